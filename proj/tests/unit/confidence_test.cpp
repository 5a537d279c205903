#include "lcdr/confidence.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "lcdr/error.hpp"
#include "oracles/oracles.hpp"

namespace lcdr {
namespace {

NeighborGraph random_graph(std::mt19937_64& rng, Index n, double zero_prob = 0.3) {
  std::uniform_real_distribution<double> weight(0.05, 2.0);
  std::bernoulli_distribution drop(zero_prob);
  NeighborGraph g;
  g.weights = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      // Keep the chain i, i+1 so no degree is zero.
      if (j == i + 1 || !drop(rng)) g.weights(i, j) = g.weights(j, i) = weight(rng);
    }
  }
  g.degrees = g.weights.rowwise().sum();
  g.k = 1;
  return g;
}

Matrix random_logical(std::mt19937_64& rng, Index n, Index q) {
  std::bernoulli_distribution coin(0.5);
  std::uniform_int_distribution<Index> pick(0, q - 1);
  Matrix l = Matrix::Zero(n, q);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < q; ++j) l(i, j) = coin(rng) ? 1.0 : 0.0;
    if (l.row(i).sum() == 0.0) l(i, pick(rng)) = 1.0;
  }
  return l;
}

void expect_feasible(const Matrix& f, const Matrix& logical) {
  for (Index i = 0; i < f.rows(); ++i) {
    EXPECT_NEAR(f.row(i).sum(), 1.0, 1e-8);
    for (Index j = 0; j < f.cols(); ++j) {
      EXPECT_GE(f(i, j), 0.0);
      EXPECT_LE(f(i, j), 1.0);
      if (logical(i, j) == 0.0) EXPECT_EQ(f(i, j), 0.0);
    }
  }
}

TEST(BuildSmoother, TwoIdenticalPoints) {
  NeighborGraph g;
  g.weights = Matrix(2, 2);
  g.weights << 0, 2, 2, 0;
  g.degrees = g.weights.rowwise().sum();
  const auto op = build_smoother(g);
  Matrix expected(2, 2);
  expected << 4, -4, -4, 4;
  EXPECT_LE((op.t - expected).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_NEAR(op.lipschitz, 8.0, 1e-9);
}

TEST(BuildSmoother, RegularGraphAnnihilatesOnes) {
  // 4-cycle with unit weights: every degree is 2.
  NeighborGraph g;
  g.weights = Matrix::Zero(4, 4);
  for (Index i = 0; i < 4; ++i) g.weights(i, (i + 1) % 4) = g.weights((i + 1) % 4, i) = 1.0;
  g.degrees = g.weights.rowwise().sum();
  const auto op = build_smoother(g);
  EXPECT_LE((op.t * Vector::Ones(4)).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(BuildSmoother, SpectrumWithinBounds) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const auto g = random_graph(rng, 6);
    const auto op = build_smoother(g);
    EXPECT_EQ(op.t, op.t.transpose());
    const Vector eig = oracle::jacobi_eigenvalues(op.t);
    EXPECT_GE(eig.minCoeff(), -1e-9);
    EXPECT_LE(eig.maxCoeff(), 8.0 + 1e-9);
    EXPECT_LE(op.lipschitz, eig.maxCoeff() + 1e-9);
    EXPECT_GE(op.lipschitz, 0.5 * eig.maxCoeff());
  }
}

TEST(BuildSmoother, ZeroDegreeIsAnError) {
  NeighborGraph g;
  g.weights = Matrix::Zero(3, 3);
  g.weights(0, 1) = g.weights(1, 0) = 1.0;
  g.degrees = g.weights.rowwise().sum();
  EXPECT_THROW(build_smoother(g), Error);
}

TEST(InitConfidence, UniformOverSupport) {
  Matrix l(2, 3);
  l << 1, 0, 0, 1, 1, 0;
  const auto f = init_confidence(l);
  Matrix expected(2, 3);
  expected << 1, 0, 0, 0.5, 0.5, 0;
  EXPECT_EQ(f.values, expected);
  EXPECT_EQ(f.support, l);
}

TEST(InitConfidence, EmptySupportIsInfeasible) {
  Matrix l(2, 2);
  l << 1, 0, 0, 0;
  try {
    init_confidence(l);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInfeasible);
    EXPECT_NE(std::string(e.what()).find("infeasible: empty support"), std::string::npos);
  }
}

Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<Index>(values.size()));
  Index j = 0;
  for (double x : values) v(j++) = x;
  return v;
}

TEST(ProjectRestrictedSimplex, Examples) {
  EXPECT_LE((project_restricted_simplex(vec({0.7, 0.3}), vec({1, 1})) - vec({0.7, 0.3}))
                .cwiseAbs()
                .maxCoeff(),
            1e-15);
  EXPECT_EQ(project_restricted_simplex(vec({2, 0}), vec({1, 1})), vec({1, 0}));
  EXPECT_EQ(project_restricted_simplex(vec({5, 5, 5}), vec({0, 1, 0})), vec({0, 1, 0}));
  EXPECT_THROW(project_restricted_simplex(vec({1, 2}), vec({0, 0})), Error);
}

TEST(ProjectRestrictedSimplex, TwoZeroMatchesBruteForce) {
  const Vector brute = oracle::brute_force_projection(vec({2, 0}), vec({1, 1}), 1e-12);
  EXPECT_LE((brute - vec({1, 0})).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(ProjectRestrictedSimplexProperty, MatchesBruteForce) {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> gauss(0.0, 1.5);
  for (int trial = 0; trial < 200; ++trial) {
    const Index q = 2 + trial % 2;
    Vector v(q);
    for (Index j = 0; j < q; ++j) v(j) = gauss(rng);
    const Vector support = random_logical(rng, 1, q).row(0).transpose();
    const Vector p = project_restricted_simplex(v, support);
    const Vector brute = oracle::brute_force_projection(v, support, 1e-12);
    // A squared-distance search pins coordinates down to about sqrt(eps).
    EXPECT_LE((p - brute).cwiseAbs().maxCoeff(), 1e-7) << "v=" << v.transpose();
    for (Index j = 0; j < q; ++j) {
      if (support(j) == 0.0) EXPECT_EQ(p(j), 0.0);
    }
  }
}

TEST(SolveConfidence, SingleLabelRowsAreOneHot) {
  std::mt19937_64 rng(2);
  const auto g = random_graph(rng, 8);
  Matrix l = random_logical(rng, 8, 3);
  l.row(0) << 0, 1, 0;
  l.row(5) << 0, 0, 1;
  const auto result = solve_confidence(build_smoother(g), l);
  EXPECT_EQ(result.confidence.values.row(0), l.row(0));
  EXPECT_EQ(result.confidence.values.row(5), l.row(5));
}

TEST(SolveConfidence, IdenticalPairStaysUniform) {
  NeighborGraph g;
  g.weights = Matrix(2, 2);
  g.weights << 0, 2, 2, 0;
  g.degrees = g.weights.rowwise().sum();
  const auto result = solve_confidence(build_smoother(g), Matrix::Ones(2, 2));
  EXPECT_TRUE(result.converged);
  EXPECT_EQ(result.confidence.values, Matrix::Constant(2, 2, 0.5));
  EXPECT_NEAR(result.objective(), 0.0, 1e-15);
}

TEST(SolveConfidence, MatchesGridOracleOnMixedSupports) {
  // n = 3, q = 2: one fixed row and two free rows.
  NeighborGraph g;
  g.weights = Matrix(3, 3);
  g.weights << 0, 1.3, 0.4, 1.3, 0, 0.9, 0.4, 0.9, 0;
  g.degrees = g.weights.rowwise().sum();
  Matrix l(3, 2);
  l << 1, 0, 1, 1, 1, 1;
  const auto op = build_smoother(g);
  const auto result = solve_confidence(op, l);
  const auto grid = oracle::grid_qp_oracle(op.t, l, 1e-3);
  const double grid_value = oracle::qp_objective(op.t, grid.values);
  EXPECT_LE(result.objective(), grid_value + 1e-6);
  EXPECT_NEAR(oracle::qp_objective(op.t, result.confidence.values), result.objective(), 1e-12);
  expect_feasible(result.confidence.values, l);
}

TEST(SolveConfidence, InfeasibleLabelsAreAHardError) {
  std::mt19937_64 rng(3);
  const auto op = build_smoother(random_graph(rng, 3));
  Matrix l(3, 2);
  l << 1, 0, 0, 0, 0, 1;
  try {
    solve_confidence(op, l);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInfeasible);
  }
}

TEST(SolveConfidence, IterationCapReturnsUnconvergedResult) {
  std::mt19937_64 rng(5);
  const auto g = random_graph(rng, 30, 0.8);
  const Matrix l = random_logical(rng, 30, 4);
  ConfidenceOptions options;
  options.max_iter = 2;
  options.tol = 0.0;
  const auto result = solve_confidence(build_smoother(g), l, options);
  EXPECT_FALSE(result.converged);
  EXPECT_EQ(result.iterations, 2);
  expect_feasible(result.confidence.values, l);
}

TEST(SolveConfidenceProperty, FeasibleAndMonotoneAtEveryIterate) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    const Index n = 5 + trial * 3;
    const auto g = random_graph(rng, n, 0.7);
    const Matrix l = random_logical(rng, n, 2 + trial % 4);
    const auto op = build_smoother(g);
    for (int cap : {1, 2, 3, 5, 8, 13, 21}) {
      ConfidenceOptions options;
      options.max_iter = cap;
      expect_feasible(solve_confidence(op, l, options).confidence.values, l);
    }
    const auto full = solve_confidence(op, l);
    const auto& trace = full.objective_trace;
    for (std::size_t t = 1; t < trace.size(); ++t) EXPECT_LE(trace[t], trace[t - 1] + 1e-12);
  }
}

TEST(ObjectiveIdentity, PairwiseFormEqualsQuadraticForm) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const Index n = 2 + trial % 9;
    const Index q = 2 + trial % 4;
    const auto g = random_graph(rng, n);
    Matrix f(n, q);
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < q; ++j) f(i, j) = unit(rng);
      f.row(i) /= f.row(i).sum();
    }
    const auto op = build_smoother(g);
    const double pairwise = graph_smoothness(g, f);
    const double quadratic = oracle::qp_objective(op.t, f);
    EXPECT_NEAR(pairwise, quadratic, 1e-9 * std::max(1.0, std::abs(pairwise)));
    EXPECT_NEAR(confidence_objective(op.t, f), quadratic, 1e-9 * std::max(1.0, quadratic));
  }
}

TEST(SolveConfidenceProperty, PermutationEquivariant) {
  std::mt19937_64 rng(17);
  const Index n = 12;
  const auto g = random_graph(rng, n, 0.5);
  const Matrix l = random_logical(rng, n, 3);
  std::vector<Index> perm(n);
  std::iota(perm.begin(), perm.end(), Index{0});
  std::shuffle(perm.begin(), perm.end(), rng);

  NeighborGraph pg;
  pg.weights.resize(n, n);
  Matrix pl(n, 3);
  for (Index i = 0; i < n; ++i) {
    pl.row(i) = l.row(perm[i]);
    for (Index j = 0; j < n; ++j) pg.weights(i, j) = g.weights(perm[i], perm[j]);
  }
  pg.degrees = pg.weights.rowwise().sum();

  ConfidenceOptions options;
  options.tol = 1e-12;
  options.max_iter = 100000;
  const auto base = solve_confidence(build_smoother(g), l, options);
  const auto permuted = solve_confidence(build_smoother(pg), pl, options);
  for (Index i = 0; i < n; ++i) {
    EXPECT_LE((permuted.confidence.values.row(i) - base.confidence.values.row(perm[i]))
                  .cwiseAbs()
                  .maxCoeff(),
              1e-6);
  }
}

}  // namespace
}  // namespace lcdr
