#include "lcdr/le_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "lcdr/error.hpp"
#include "oracles/oracles.hpp"
#include "temp_dir.hpp"

namespace lcdr {
namespace {

Matrix gaussian(std::mt19937_64& rng, Index rows, Index cols, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) m(i, j) = g(rng);
  }
  return m;
}

Matrix random_distributions(std::mt19937_64& rng, Index n, Index q) {
  std::exponential_distribution<double> e(1.0);
  Matrix f(n, q);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < q; ++j) f(i, j) = e(rng);
    f.row(i) /= f.row(i).sum();
  }
  return f;
}

LeModel model_with(Matrix weights, double beta = 0.1) {
  LeModel m;
  m.weights = std::move(weights);
  m.beta = beta;
  return m;
}

TEST(Forward, NegativeLogitsGiveUniform) {
  // W x = (-1, -2).
  Matrix w(2, 1);
  w << -1, -2;
  Vector x(1);
  x << 1;
  const Vector p = forward(model_with(w), x);
  EXPECT_DOUBLE_EQ(p(0), 0.5);
  EXPECT_DOUBLE_EQ(p(1), 0.5);
}

TEST(Forward, ClosedFormSoftmax) {
  Matrix w(2, 1);
  w << std::log(3.0), 0;
  Vector x(1);
  x << 1;
  const Vector p = forward(model_with(w), x);
  EXPECT_NEAR(p(0), 0.75, 1e-15);
  EXPECT_NEAR(p(1), 0.25, 1e-15);
}

TEST(Forward, ZeroWeightsUniformAndErrors) {
  const auto m = model_with(Matrix::Zero(4, 3));
  Vector x(3);
  x << 5, -2, 1e3;
  EXPECT_EQ(forward(m, x), Vector::Constant(4, 0.25));
  EXPECT_THROW(forward(m, Vector::Zero(2)), Error);
  x(1) = std::nan("");
  EXPECT_THROW(forward(m, x), Error);
}

TEST(ForwardProperty, StrictlyPositiveAndNormalized) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const auto m = model_with(gaussian(rng, 5, 4, 3.0));
    const Vector p = forward(m, gaussian(rng, 4, 1, 3.0).col(0));
    EXPECT_TRUE((p.array() > 0.0).all());
    EXPECT_NEAR(p.sum(), 1.0, 1e-12);
  }
}

TEST(Loss, Examples) {
  const Index n = 6;
  std::mt19937_64 rng(2);
  const Matrix x = gaussian(rng, n, 3);
  const auto zero = model_with(Matrix::Zero(2, 3));
  EXPECT_EQ(loss(zero, x, Matrix::Constant(n, 2, 0.5)), 0.0);
  Matrix onehot = Matrix::Zero(n, 2);
  onehot.col(0).setOnes();
  EXPECT_NEAR(loss(zero, x, onehot), 0.5 * n, 1e-14);
}

TEST(Loss, MatchesPerSampleOracle) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto m = model_with(gaussian(rng, 4, 3), 0.3);
    const Matrix x = gaussian(rng, 10, 3);
    const Matrix f = random_distributions(rng, 10, 4);
    EXPECT_NEAR(loss(m, x, f), oracle::le_loss(m.weights, m.beta, x, f), 1e-10);
  }
  EXPECT_THROW(loss(model_with(Matrix::Zero(2, 3)), Matrix::Zero(4, 2), Matrix::Zero(4, 2)),
               Error);
}

TEST(Gradient, StationaryAtUniform) {
  std::mt19937_64 rng(4);
  const Matrix x = gaussian(rng, 7, 3);
  const auto zero = model_with(Matrix::Zero(3, 3));
  EXPECT_EQ(gradient(zero, x, Matrix::Constant(7, 3, 1.0 / 3.0)).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Gradient, RegularizerIsLinearInBeta) {
  std::mt19937_64 rng(5);
  const Matrix w = gaussian(rng, 3, 2);
  const Matrix x = gaussian(rng, 8, 2);
  const Matrix f = random_distributions(rng, 8, 3);
  const Matrix g0 = gradient(model_with(w, 0.0), x, f);
  const Matrix g1 = gradient(model_with(w, 0.25), x, f);
  const Matrix g2 = gradient(model_with(w, 0.5), x, f);
  EXPECT_LE(((g2 - g0) - 2.0 * (g1 - g0)).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LE(((g1 - g0) - 0.5 * w).cwiseAbs().maxCoeff(), 1e-14);
}

double max_rel_error(const Matrix& analytic, const Matrix& numeric) {
  double worst = 0.0;
  for (Index r = 0; r < analytic.rows(); ++r) {
    for (Index c = 0; c < analytic.cols(); ++c) {
      const double scale = std::max({std::abs(analytic(r, c)), std::abs(numeric(r, c)), 1e-6});
      worst = std::max(worst, std::abs(analytic(r, c) - numeric(r, c)) / scale);
    }
  }
  return worst;
}

TEST(GradientProperty, MatchesCentralDifferences) {
  std::mt19937_64 rng(6);
  int masked = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto m = model_with(gaussian(rng, 4, 3), 0.1);
    const Matrix x = gaussian(rng, 5, 3);
    const Matrix f = random_distributions(rng, 5, 4);
    const Matrix z = x * m.weights.transpose();
    // Central differences across a ReLU kink estimate nothing.
    if ((z.array().abs() <= 1e-5 * x.cwiseAbs().maxCoeff()).any()) {
      --trial;
      continue;
    }
    if ((z.array() < 0.0).any()) ++masked;
    const Matrix analytic = gradient(m, x, f);
    const Matrix numeric = oracle::fd_gradient_oracle(m, x, f, 1e-5);
    EXPECT_LE(max_rel_error(analytic, numeric), 1e-4) << "trial " << trial;
  }
  EXPECT_GT(masked, 50);
}

TEST(GradientProperty, FullBatchDescent) {
  std::mt19937_64 rng(7);
  auto m = model_with(gaussian(rng, 3, 2, 0.5), 0.1);
  const Matrix x = gaussian(rng, 40, 2);
  const Matrix f = random_distributions(rng, 40, 3);
  double previous = loss(m, x, f);
  for (int step = 0; step < 100; ++step) {
    m.weights -= 1e-3 * gradient(m, x, f);
    const double current = loss(m, x, f);
    EXPECT_LE(current, previous + 1e-12);
    previous = current;
  }
}

TEST(Train, UniformTargetsStayAtZero) {
  std::mt19937_64 rng(8);
  const Matrix x = gaussian(rng, 20, 3);
  TrainConfig cfg;
  cfg.init_scale = 0.0;
  cfg.max_epochs = 20;
  cfg.converge_tol = -0.0;
  const auto result = train(x, Matrix::Constant(20, 4, 0.25), cfg);
  EXPECT_EQ(result.model.weights, Matrix::Zero(4, 3));
  for (double l : result.epoch_loss) EXPECT_EQ(l, 0.0);
}

TEST(Train, SeparableToyMakesProgress) {
  std::mt19937_64 rng(9);
  const Index n = 50;
  const Matrix x = gaussian(rng, n, 2);
  Matrix f = Matrix::Zero(n, 2);
  for (Index i = 0; i < n; ++i) f(i, x(i, 0) + 0.5 * x(i, 1) > 0.0 ? 0 : 1) = 1.0;
  TrainConfig cfg;
  cfg.seed = 3;
  const auto result = train(x, f, cfg);
  const double zero_loss = loss(model_with(Matrix::Zero(2, 2), cfg.beta), x, f);
  const double final_loss = loss(result.model, x, f);
  EXPECT_LE(final_loss, 0.5 * zero_loss);
}

TEST(Train, DeterministicGivenSeed) {
  std::mt19937_64 rng(10);
  const Matrix x = gaussian(rng, 64, 4);
  const Matrix f = random_distributions(rng, 64, 3);
  TrainConfig cfg;
  cfg.seed = 77;
  cfg.max_epochs = 50;
  const auto a = train(x, f, cfg);
  const auto b = train(x, f, cfg);
  EXPECT_EQ(a.model.weights, b.model.weights);
  EXPECT_EQ(a.epoch_loss, b.epoch_loss);
  cfg.seed = 78;
  EXPECT_NE(train(x, f, cfg).model.weights, a.model.weights);
}

TEST(Train, FullBatchRecoverIsRowPermutationEquivariant) {
  std::mt19937_64 rng(11);
  const Index n = 30;
  const Matrix x = gaussian(rng, n, 3);
  const Matrix f = random_distributions(rng, n, 3);
  std::vector<Index> perm(n);
  std::iota(perm.begin(), perm.end(), Index{0});
  std::shuffle(perm.begin(), perm.end(), rng);
  Matrix px(n, 3);
  Matrix pf(n, 3);
  for (Index i = 0; i < n; ++i) {
    px.row(i) = x.row(perm[i]);
    pf.row(i) = f.row(perm[i]);
  }
  TrainConfig cfg;
  cfg.batch_size = n;
  cfg.max_epochs = 200;
  const Matrix base = recover(train(x, f, cfg).model, x);
  const Matrix permuted = recover(train(px, pf, cfg).model, px);
  for (Index i = 0; i < n; ++i) {
    EXPECT_LE((permuted.row(i) - base.row(perm[i])).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(Train, DivergenceIsReported) {
  std::mt19937_64 rng(12);
  const Matrix x = gaussian(rng, 20, 3, 1e150);
  TrainConfig cfg;
  cfg.learning_rate = 1e150;
  cfg.momentum = 0.0;
  try {
    train(x, random_distributions(rng, 20, 2), cfg);
    FAIL() << "expected divergence";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDivergence);
    EXPECT_NE(std::string(e.what()).find("diverged at epoch "), std::string::npos) << e.what();
  }
}

TEST(Train, InvalidConfig) {
  const Matrix x = Matrix::Zero(4, 2);
  const Matrix f = Matrix::Constant(4, 2, 0.5);
  TrainConfig cfg;
  cfg.learning_rate = 0.0;
  EXPECT_THROW(train(x, f, cfg), Error);
  cfg = {};
  cfg.momentum = 1.0;
  EXPECT_THROW(train(x, f, cfg), Error);
  cfg = {};
  cfg.batch_size = 0;
  EXPECT_THROW(train(x, f, cfg), Error);
}

TEST(Recover, RowsAreForwardOutputs) {
  std::mt19937_64 rng(13);
  const auto m = model_with(gaussian(rng, 3, 4));
  const Matrix x = gaussian(rng, 12, 4);
  const Matrix d = recover(m, x);
  for (Index i = 0; i < 12; ++i) {
    EXPECT_NEAR(d.row(i).sum(), 1.0, 1e-12);
    EXPECT_EQ(d.row(i).transpose(), forward(m, x.row(i).transpose()));
  }
  EXPECT_EQ(recover(model_with(Matrix::Zero(4, 4)), x), Matrix::Constant(12, 4, 0.25));
}

TEST(Checkpoint, RoundTrip) {
  testing::TempDir dir;
  std::mt19937_64 rng(14);
  const auto m = model_with(gaussian(rng, 3, 5), 0.125);
  const auto path = dir.file("model.csv");
  save_model(m, path);
  EXPECT_EQ(testing::slurp(path).substr(0, 24), "q=3,d_prime=5,beta=0.125");
  const auto back = load_model(path);
  EXPECT_EQ(back.weights, m.weights);
  EXPECT_EQ(back.beta, m.beta);
}

}  // namespace
}  // namespace lcdr
