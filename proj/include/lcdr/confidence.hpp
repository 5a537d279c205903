#pragma once

#include <vector>

#include "lcdr/graph.hpp"
#include "lcdr/types.hpp"

namespace lcdr {

/// Row-stochastic label confidence restricted to the logical-label support.
struct ConfidenceMatrix {
  Matrix values;   // n x q
  Matrix support;  // n x q, entries in {0, 1}
};

/// T = 4 (I - J^{-1/2} W J^{-1/2}) where J = diag(degrees).
///
/// The confidence objective is 1/2 sum_c F_c^T T F_c over the label columns
/// F_c, i.e. the block-diagonal Hessian diag(T, ..., T) is never formed.
struct SmoothingOperator {
  Matrix t;
  /// Largest eigenvalue of T, estimated by power iteration. T's spectrum
  /// lies in [0, 8].
  double lipschitz = 8.0;
};

SmoothingOperator build_smoother(const NeighborGraph& graph);

/// Uniform distribution over each row's positive labels.
ConfidenceMatrix init_confidence(const Matrix& logical);

/// Euclidean projection of v onto {f : sum f = 1, f >= 0, f_l = 0 where
/// support_l = 0}, by sort-and-threshold over the support coordinates.
/// Off-support entries of the result are exactly zero.
Vector project_restricted_simplex(const Vector& v, const Vector& support);

/// 1/2 tr(F^T T F).
double confidence_objective(const Matrix& t, const Matrix& f);

/// sum_ij w_ij |f_i / sqrt(d_ii) - f_j / sqrt(d_jj)|^2, evaluated pairwise.
/// Equals confidence_objective(build_smoother(graph).t, f).
double graph_smoothness(const NeighborGraph& graph, const Matrix& f);

struct ConfidenceOptions {
  double tol = 1e-7;  // on the max absolute entry change per iteration
  int max_iter = 5000;
};

struct ConfidenceResult {
  ConfidenceMatrix confidence;
  int iterations = 0;
  bool converged = false;
  double step = 0.0;  // the step size in force at exit
  /// Objective at the initial point and after every accepted iterate.
  std::vector<double> objective_trace;

  double objective() const { return objective_trace.back(); }
};

/// Projected gradient descent F <- P(F - T F / lipschitz) from the
/// uniform-over-support start. A step that raises the objective is rejected
/// and the step size drops permanently to 1/8, the spectral bound.
///
/// Throws Error(kInfeasible) for a row with empty support. Hitting max_iter
/// is not an error; check `converged`.
ConfidenceResult solve_confidence(const SmoothingOperator& smoother,
                                  const Matrix& logical,
                                  const ConfidenceOptions& options = {});

}  // namespace lcdr
