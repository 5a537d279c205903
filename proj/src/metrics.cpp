#include "lcdr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "lcdr/error.hpp"

namespace lcdr {

namespace {

void check_lengths(const VectorRef& d, const VectorRef& d_hat) {
  if (d.size() != d_hat.size()) {
    throw invalid_input("distribution lengths differ (" + std::to_string(d.size()) +
                        " vs " + std::to_string(d_hat.size()) + ")");
  }
}

}  // namespace

double chebyshev(const VectorRef& d, const VectorRef& d_hat) {
  check_lengths(d, d_hat);
  return (d - d_hat).cwiseAbs().maxCoeff();
}

double clark(const VectorRef& d, const VectorRef& d_hat) {
  check_lengths(d, d_hat);
  double sum = 0.0;
  for (Index j = 0; j < d.size(); ++j) {
    const double denom = d(j) + d_hat(j);
    if (denom == 0.0) continue;
    const double diff = d(j) - d_hat(j);
    sum += diff * diff / (denom * denom);
  }
  return std::sqrt(sum);
}

double canberra(const VectorRef& d, const VectorRef& d_hat) {
  check_lengths(d, d_hat);
  double sum = 0.0;
  for (Index j = 0; j < d.size(); ++j) {
    const double denom = d(j) + d_hat(j);
    if (denom == 0.0) continue;
    sum += std::abs(d(j) - d_hat(j)) / denom;
  }
  return sum;
}

double kl(const VectorRef& d, const VectorRef& d_hat) {
  check_lengths(d, d_hat);
  double sum = 0.0;
  for (Index j = 0; j < d.size(); ++j) {
    if (d(j) == 0.0) continue;
    if (d_hat(j) <= 0.0) {
      throw invalid_input("KL divergence is infinite: label " + std::to_string(j + 1) +
                          " has mass in the truth but none in the prediction");
    }
    sum += d(j) * std::log(d(j) / d_hat(j));
  }
  return sum;
}

double cosine(const VectorRef& d, const VectorRef& d_hat) {
  check_lengths(d, d_hat);
  const double norms = d.norm() * d_hat.norm();
  if (norms == 0.0) throw invalid_input("cosine similarity of a zero vector");
  return d.dot(d_hat) / norms;
}

double intersection(const VectorRef& d, const VectorRef& d_hat) {
  check_lengths(d, d_hat);
  return d.cwiseMin(d_hat).sum();
}

MetricReport report(const Matrix& truth, const Matrix& predicted) {
  if (truth.rows() != predicted.rows() || truth.cols() != predicted.cols()) {
    throw invalid_input("shape mismatch: truth is " + std::to_string(truth.rows()) + "x" +
                        std::to_string(truth.cols()) + ", prediction is " +
                        std::to_string(predicted.rows()) + "x" +
                        std::to_string(predicted.cols()));
  }
  if (truth.rows() == 0) throw invalid_input("cannot report on zero instances");

  MetricReport out;
  out.n_instances = truth.rows();
  for (Index i = 0; i < truth.rows(); ++i) {
    const Vector d = truth.row(i).transpose();
    const Vector d_hat = predicted.row(i).transpose();
    try {
      out.chebyshev += chebyshev(d, d_hat);
      out.clark += clark(d, d_hat);
      out.canberra += canberra(d, d_hat);
      out.kl += kl(d, d_hat);
      out.cosine += cosine(d, d_hat);
      out.intersection += intersection(d, d_hat);
    } catch (const Error& e) {
      throw Error(e.kind(), "row " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  const double n = static_cast<double>(truth.rows());
  out.chebyshev /= n;
  out.clark /= n;
  out.canberra /= n;
  out.kl /= n;
  out.cosine /= n;
  out.intersection /= n;
  return out;
}

std::string to_json(const MetricReport& r) {
  nlohmann::ordered_json j;
  j["chebyshev"] = r.chebyshev;
  j["clark"] = r.clark;
  j["canberra"] = r.canberra;
  j["kl"] = r.kl;
  j["cosine"] = r.cosine;
  j["intersection"] = r.intersection;
  return j.dump(2) + "\n";
}

std::string summary_line(const MetricReport& r, bool with_intersection) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(4);
  os << "chebyshev " << r.chebyshev << "  clark " << r.clark << "  canberra "
     << r.canberra << "  kl " << r.kl << "  cosine " << r.cosine;
  if (with_intersection) os << "  intersection " << r.intersection;
  return os.str();
}

Vector average_ranks(const Matrix& scores, bool higher_is_better) {
  const Index methods = scores.rows();
  const Index datasets = scores.cols();
  if (methods == 0 || datasets == 0) throw invalid_input("average_ranks: empty table");
  if (!scores.allFinite()) throw invalid_input("average_ranks: missing or non-finite cell");

  Vector total = Vector::Zero(methods);
  std::vector<Index> order(static_cast<std::size_t>(methods));
  for (Index s = 0; s < datasets; ++s) {
    std::iota(order.begin(), order.end(), Index{0});
    const auto better = [&](Index a, Index b) {
      return higher_is_better ? scores(a, s) > scores(b, s) : scores(a, s) < scores(b, s);
    };
    std::stable_sort(order.begin(), order.end(), better);
    std::size_t start = 0;
    while (start < order.size()) {
      std::size_t end = start + 1;
      while (end < order.size() && scores(order[end], s) == scores(order[start], s)) ++end;
      // Positions start..end-1 hold 1-based ranks start+1..end.
      const double mean_rank = 0.5 * static_cast<double>(start + 1 + end);
      for (std::size_t r = start; r < end; ++r) total(order[r]) += mean_rank;
      start = end;
    }
  }
  return total / static_cast<double>(datasets);
}

}  // namespace lcdr
