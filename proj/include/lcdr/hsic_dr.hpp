#pragma once

#include "lcdr/types.hpp"

namespace lcdr {

/// Linear projection maximizing HSIC between projected features and label
/// confidence, subject to P^T (alpha X^T X + (1 - alpha) I) P = I.
struct Projection {
  Matrix p;            // d x d_prime
  Vector eigenvalues;  // descending
  double alpha = 0.0;
  Index d_prime = 0;
};

/// H = I - (1/n) 1 1^T.
Matrix centering_matrix(Index n);

/// Gram matrix F F^T of the confidence rows.
Matrix label_kernel(const Matrix& confidence);

/// (n - 1)^{-2} tr(H K H F~).
double hsic_value(const Matrix& k, const Matrix& f_tilde);

/// Top eigenpairs of the symmetric-definite pencil (A, B).
///
/// B is factored as L L^T, the symmetric matrix L^{-1} A L^{-T} is
/// diagonalized, and eigenvectors are mapped back with L^{-T}, so the
/// returned columns are B-orthonormal. A relative jitter of
/// 1e-10 tr(B) / d is added to B's diagonal first. Columns are ordered by
/// descending eigenvalue (ties: smaller index of the largest-magnitude entry
/// first) and signed so their largest-magnitude entry is positive.
struct GeneralizedEigen {
  Matrix vectors;
  Vector values;
};
GeneralizedEigen solve_generalized_eigen(const Matrix& a, const Matrix& b, Index count);

/// Builds A = X^T H F~ H X and B = alpha X^T X + (1 - alpha) I from
/// instance-row features X (n x d) and solves for the top d_prime directions.
/// X is expected to be column-standardized already.
Projection solve_projection(const Matrix& x, const Matrix& f_tilde, double alpha,
                            Index d_prime);

/// X P.
Matrix project(const Matrix& x, const Projection& projection);

}  // namespace lcdr
