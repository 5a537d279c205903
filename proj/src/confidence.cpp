#include "lcdr/confidence.hpp"

#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <functional>

#include "lcdr/error.hpp"
#include "lcdr/random.hpp"

namespace lcdr {

namespace {

constexpr int kPowerIterations = 30;
constexpr double kSpectralBound = 8.0;

double power_iteration(const Matrix& t) {
  Rng rng(0, Stream::kPowerIteration);
  Vector v(t.rows());
  for (Index i = 0; i < v.size(); ++i) v(i) = rng.normal();
  v.normalize();
  double rayleigh = 0.0;
  for (int it = 0; it < kPowerIterations; ++it) {
    Vector w = t * v;
    rayleigh = v.dot(w);
    const double norm = w.norm();
    if (norm == 0.0) break;
    v = w / norm;
  }
  return rayleigh;
}

void check_support(const Matrix& logical) {
  for (Index i = 0; i < logical.rows(); ++i) {
    if (!(logical.row(i).array() > 0.0).any()) {
      throw infeasible("infeasible: empty support in row " + std::to_string(i + 1));
    }
  }
}

}  // namespace

SmoothingOperator build_smoother(const NeighborGraph& graph) {
  const Index n = graph.weights.rows();
  for (Index i = 0; i < n; ++i) {
    if (!(graph.degrees(i) > 0.0)) {
      throw infeasible("zero degree at instance " + std::to_string(i + 1));
    }
  }
  const Vector inv_sqrt = graph.degrees.array().rsqrt();
  SmoothingOperator op;
  op.t = -4.0 * (inv_sqrt.asDiagonal() * graph.weights * inv_sqrt.asDiagonal());
  op.t.diagonal().array() += 4.0;
  // Exact symmetry; the scaled product can differ in the last bit.
  op.t = 0.5 * (op.t + op.t.transpose()).eval();
  const double estimate = power_iteration(op.t);
  op.lipschitz = (estimate > 0.0 && estimate < kSpectralBound) ? estimate : kSpectralBound;
  return op;
}

ConfidenceMatrix init_confidence(const Matrix& logical) {
  check_support(logical);
  ConfidenceMatrix f;
  f.support = (logical.array() > 0.0).cast<double>().matrix();
  f.values = f.support;
  for (Index i = 0; i < f.values.rows(); ++i) {
    f.values.row(i) /= f.support.row(i).sum();
  }
  return f;
}

Vector project_restricted_simplex(const Vector& v, const Vector& support) {
  if (v.size() != support.size()) {
    throw invalid_input("projection: vector and support lengths differ");
  }
  std::vector<double> u;
  for (Index j = 0; j < v.size(); ++j) {
    if (support(j) > 0.0) u.push_back(v(j));
  }
  if (u.empty()) throw infeasible("infeasible: empty support");

  Vector out = Vector::Zero(v.size());
  if (u.size() == 1) {
    for (Index j = 0; j < v.size(); ++j) {
      if (support(j) > 0.0) out(j) = 1.0;
    }
    return out;
  }

  std::sort(u.begin(), u.end(), std::greater<>());
  double cumsum = 0.0;
  double theta = 0.0;
  for (std::size_t r = 0; r < u.size(); ++r) {
    cumsum += u[r];
    const double candidate = (cumsum - 1.0) / static_cast<double>(r + 1);
    if (u[r] - candidate > 0.0) theta = candidate;
  }
  for (Index j = 0; j < v.size(); ++j) {
    if (support(j) > 0.0) out(j) = std::max(v(j) - theta, 0.0);
  }
  return out;
}

double confidence_objective(const Matrix& t, const Matrix& f) {
  return 0.5 * (f.transpose() * t * f).trace();
}

double graph_smoothness(const NeighborGraph& graph, const Matrix& f) {
  const Index n = graph.weights.rows();
  double total = 0.0;
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      const double w = graph.weights(i, j);
      if (w == 0.0) continue;
      const double di = std::sqrt(graph.degrees(i));
      const double dj = std::sqrt(graph.degrees(j));
      total += w * (f.row(i) / di - f.row(j) / dj).squaredNorm();
    }
  }
  return total;
}

ConfidenceResult solve_confidence(const SmoothingOperator& smoother, const Matrix& logical,
                                  const ConfidenceOptions& options) {
  const Index n = smoother.t.rows();
  if (smoother.t.cols() != n || logical.rows() != n) {
    throw invalid_input("solve_confidence: T is " + std::to_string(n) + "x" +
                        std::to_string(smoother.t.cols()) + " but labels have " +
                        std::to_string(logical.rows()) + " rows");
  }
  if (!(options.tol >= 0.0) || options.max_iter < 0) {
    throw invalid_input("solve_confidence: tol must be >= 0 and max_iter >= 0");
  }

  ConfidenceResult result;
  result.confidence = init_confidence(logical);
  Matrix& f = result.confidence.values;
  const Matrix& support = result.confidence.support;

  // T comes from a k-NN graph and is mostly zeros.
  const Eigen::SparseMatrix<double> t = smoother.t.sparseView();
  const auto objective_of = [](const Matrix& values, const Matrix& grad) {
    return 0.5 * values.cwiseProduct(grad).sum();
  };

  Matrix grad = t * f;
  double objective = objective_of(f, grad);
  result.objective_trace.push_back(objective);
  double step = 1.0 / smoother.lipschitz;
  const double safe_step = 1.0 / kSpectralBound;

  Matrix candidate(f.rows(), f.cols());
  for (int it = 0; it < options.max_iter; ++it) {
    const Matrix moved = f - step * grad;
    for (Index i = 0; i < n; ++i) {
      candidate.row(i) =
          project_restricted_simplex(moved.row(i).transpose(), support.row(i).transpose())
              .transpose();
    }
    Matrix candidate_grad = t * candidate;
    const double candidate_objective = objective_of(candidate, candidate_grad);
    ++result.iterations;

    if (candidate_objective > objective + 1e-12 * std::max(1.0, std::abs(objective)) &&
        step > safe_step) {
      step = safe_step;
      continue;
    }

    const double change = (candidate - f).cwiseAbs().maxCoeff();
    f.swap(candidate);
    grad.swap(candidate_grad);
    objective = candidate_objective;
    result.objective_trace.push_back(objective);
    if (change <= options.tol) {
      result.converged = true;
      break;
    }
  }
  result.step = step;
  return result;
}

}  // namespace lcdr
