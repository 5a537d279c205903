#include "lcdr/hsic_dr.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "lcdr/error.hpp"

namespace lcdr {

namespace {

Index argmax_abs(const Eigen::Ref<const Vector>& v) {
  Index best = 0;
  v.cwiseAbs().maxCoeff(&best);
  return best;
}

}  // namespace

Matrix centering_matrix(Index n) {
  if (n < 2) throw invalid_input("centering matrix needs n >= 2");
  Matrix h = Matrix::Constant(n, n, -1.0 / static_cast<double>(n));
  h.diagonal().array() += 1.0;
  return h;
}

Matrix label_kernel(const Matrix& confidence) {
  return confidence * confidence.transpose();
}

double hsic_value(const Matrix& k, const Matrix& f_tilde) {
  const Index n = k.rows();
  if (k.cols() != n || f_tilde.rows() != n || f_tilde.cols() != n) {
    throw invalid_input("hsic_value: kernels must both be n x n");
  }
  if (n < 2) throw invalid_input("hsic_value: n must be >= 2");
  // H K H == K with rows and columns mean-centered.
  Matrix kc = k;
  kc.rowwise() -= kc.colwise().mean();
  kc.colwise() -= kc.rowwise().mean();
  const double trace = kc.cwiseProduct(f_tilde.transpose()).sum();
  const double scale = static_cast<double>(n - 1);
  return trace / (scale * scale);
}

GeneralizedEigen solve_generalized_eigen(const Matrix& a, const Matrix& b, Index count) {
  const Index d = a.rows();
  if (a.cols() != d || b.rows() != d || b.cols() != d) {
    throw invalid_input("generalized eigenproblem: A and B must be square and equal size");
  }
  if (count < 1 || count > d) {
    throw invalid_input("requested " + std::to_string(count) +
                        " eigenpairs from a problem of size " + std::to_string(d));
  }

  Matrix b_jittered = 0.5 * (b + b.transpose());
  const double jitter = 1e-10 * b_jittered.trace() / static_cast<double>(d);
  if (jitter > 0.0) b_jittered.diagonal().array() += jitter;
  Eigen::LLT<Matrix> chol(b_jittered);
  if (chol.info() != Eigen::Success) {
    throw invalid_input("B is not numerically positive definite");
  }
  const auto lower = chol.matrixL();

  // C = L^{-1} A L^{-T}
  Matrix c = lower.solve(0.5 * (a + a.transpose()));
  c = lower.solve(c.transpose().eval());
  c = 0.5 * (c + c.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Matrix> eig(c);
  if (eig.info() != Eigen::Success) throw invalid_input("eigensolver failed to converge");
  const Matrix vectors = chol.matrixU().solve(eig.eigenvectors());
  const Vector& values = eig.eigenvalues();

  std::vector<Index> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), Index{0});
  std::vector<Index> lead(static_cast<std::size_t>(d));
  for (Index j = 0; j < d; ++j) lead[j] = argmax_abs(vectors.col(j));
  std::stable_sort(order.begin(), order.end(), [&](Index x, Index y) {
    if (values(x) != values(y)) return values(x) > values(y);
    return lead[x] < lead[y];
  });

  GeneralizedEigen out;
  out.vectors.resize(d, count);
  out.values.resize(count);
  for (Index j = 0; j < count; ++j) {
    const Index src = order[j];
    out.values(j) = values(src);
    out.vectors.col(j) = vectors.col(src);
    if (out.vectors(lead[src], j) < 0.0) out.vectors.col(j) *= -1.0;
  }
  return out;
}

Projection solve_projection(const Matrix& x, const Matrix& f_tilde, double alpha,
                            Index d_prime) {
  const Index n = x.rows();
  const Index d = x.cols();
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw invalid_input("alpha must lie in [0, 1]");
  if (d_prime < 1 || d_prime > d) {
    throw invalid_input("d_prime must lie in [1, " + std::to_string(d) + "], got " +
                        std::to_string(d_prime));
  }
  if (f_tilde.rows() != n || f_tilde.cols() != n) {
    throw invalid_input("label kernel must be n x n");
  }

  Matrix centered = x;  // H X
  centered.rowwise() -= centered.colwise().mean();
  const Matrix a = centered.transpose() * f_tilde * centered;
  Matrix b = alpha * (x.transpose() * x);
  b.diagonal().array() += 1.0 - alpha;

  GeneralizedEigen eig = solve_generalized_eigen(a, b, d_prime);
  Projection projection;
  projection.p = std::move(eig.vectors);
  projection.eigenvalues = std::move(eig.values);
  projection.alpha = alpha;
  projection.d_prime = d_prime;
  return projection;
}

Matrix project(const Matrix& x, const Projection& projection) {
  if (x.cols() != projection.p.rows()) {
    throw invalid_input("project: features have " + std::to_string(x.cols()) +
                        " columns, projection expects " +
                        std::to_string(projection.p.rows()));
  }
  return x * projection.p;
}

}  // namespace lcdr
