#include "lcdr/graph.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "lcdr/error.hpp"

namespace lcdr {

Matrix pairwise_sq_dists(const Matrix& x) {
  if (x.rows() < 2) throw invalid_input("pairwise distances need at least 2 rows");
  if (!x.allFinite()) throw invalid_input("pairwise distances: non-finite input");
  const Index n = x.rows();
  const Matrix xt = x.transpose();  // column access is contiguous
  Matrix dist = Matrix::Zero(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = j + 1; i < n; ++i) {
      const double v = (xt.col(i) - xt.col(j)).squaredNorm();
      dist(i, j) = v;
      dist(j, i) = v;
    }
  }
  return dist;
}

NeighborGraph build_graph(const Matrix& x, Index k, SigmaMode sigma_mode) {
  const Index n = x.rows();
  if (n < 2) throw invalid_input("graph needs at least 2 instances");
  if (k < 1 || k > n - 1) {
    throw invalid_input("k must lie in [1, " + std::to_string(n - 1) + "], got " +
                        std::to_string(k));
  }
  if (sigma_mode.kind == SigmaMode::Kind::kFixed && !(sigma_mode.value > 0.0)) {
    throw invalid_input("sigma must be positive");
  }

  const Matrix dist = pairwise_sq_dists(x);

  // neighbors[i * k + r] is the r-th nearest neighbor of i.
  std::vector<Index> neighbors(static_cast<std::size_t>(n * k));
  std::vector<Index> order(static_cast<std::size_t>(n - 1));
  for (Index i = 0; i < n; ++i) {
    std::size_t m = 0;
    for (Index j = 0; j < n; ++j) {
      if (j != i) order[m++] = j;
    }
    const auto closer = [&](Index a, Index b) {
      const double da = dist(i, a);
      const double db = dist(i, b);
      return da < db || (da == db && a < b);
    };
    std::partial_sort(order.begin(), order.begin() + k, order.end(), closer);
    std::copy(order.begin(), order.begin() + k, neighbors.begin() + i * k);
  }

  double sigma = sigma_mode.value;
  if (sigma_mode.kind == SigmaMode::Kind::kMeanKnnDistance) {
    double total = 0.0;
    for (Index i = 0; i < n; ++i) total += std::sqrt(dist(i, neighbors[i * k + k - 1]));
    sigma = total / static_cast<double>(n);
    // All k-th neighbors coincide with their points; any bandwidth gives exp(0).
    if (!(sigma > 0.0)) sigma = 1.0;
  }

  const double inv_sigma_sq = 1.0 / (sigma * sigma);
  Matrix directed = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index r = 0; r < k; ++r) {
      const Index j = neighbors[i * k + r];
      directed(i, j) = std::exp(-dist(i, j) * inv_sigma_sq);
    }
  }

  NeighborGraph graph;
  graph.weights = directed + directed.transpose();
  graph.degrees = graph.weights.rowwise().sum();
  graph.k = k;
  graph.sigma = sigma;
  return graph;
}

}  // namespace lcdr
