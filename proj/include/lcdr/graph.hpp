#pragma once

#include "lcdr/types.hpp"

namespace lcdr {

/// How the Gaussian bandwidth is chosen.
struct SigmaMode {
  enum class Kind { kFixed, kMeanKnnDistance };
  Kind kind = Kind::kMeanKnnDistance;
  double value = 1.0;  // used when kind == kFixed

  static SigmaMode fixed(double s) { return {Kind::kFixed, s}; }
  static SigmaMode mean_knn_distance() { return {Kind::kMeanKnnDistance, 0.0}; }
};

/// Symmetrized k-nearest-neighbor graph.
///
/// weights(i, j) = g(i, j) + g(j, i) where g(i, j) = exp(-|x_i - x_j|^2 / sigma^2)
/// when j is one of the k nearest neighbors of i (self excluded, ties broken
/// towards the smaller index) and 0 otherwise. Degrees are row sums of the
/// symmetrized weights.
struct NeighborGraph {
  Matrix weights;
  Vector degrees;
  Index k = 0;
  double sigma = 1.0;
};

/// Entry (i, j) is the squared Euclidean distance between rows i and j.
/// Every entry is computed independently of the others.
Matrix pairwise_sq_dists(const Matrix& x);

NeighborGraph build_graph(const Matrix& x, Index k, SigmaMode sigma_mode);

}  // namespace lcdr
