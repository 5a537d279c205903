#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lcdr/types.hpp"

namespace lcdr {

/// Softmax(ReLU(W x)) with one weight matrix shared by all instances and no
/// bias. The penalty on W is beta * |W|_F^2.
struct LeModel {
  Matrix weights;  // q x d_prime
  double beta = 0.1;

  Index q() const { return weights.rows(); }
  Index d_prime() const { return weights.cols(); }
};

/// Mini-batch SGD with momentum and weight decay.
///
/// Each step descends (1/|batch|) sum_batch |f_i - p_i|^2 + (beta/n) |W|^2,
/// an unbiased estimate of loss()/n, plus weight_decay * W. Momentum follows
/// the v <- momentum * v + g, W <- W - learning_rate * v convention.
struct TrainConfig {
  double learning_rate = 0.01;
  double momentum = 0.9;
  double weight_decay = 5e-4;
  double beta = 0.1;
  Index batch_size = 32;
  int max_epochs = 500;
  /// Stop once |loss()/n| changes by at most this much between epochs.
  double converge_tol = 1e-6;
  std::uint64_t seed = 0;
  /// Initial weights are uniform in [-init_scale, init_scale].
  double init_scale = 0.01;
};

void validate(const TrainConfig& config);

Vector forward(const LeModel& model, const Vector& x);

/// sum_i |f_i - Softmax(ReLU(W x_i))|^2 + beta |W|_F^2.
double loss(const LeModel& model, const Matrix& x, const Matrix& f);

/// Analytic d loss / d W. The ReLU subgradient at 0 is 0.
Matrix gradient(const LeModel& model, const Matrix& x, const Matrix& f);

struct TrainResult {
  LeModel model;
  /// loss()/n after each epoch, preceded by its value at initialization.
  std::vector<double> epoch_loss;
  int epochs = 0;
  bool converged = false;
};

/// Deterministic given config.seed: initialization draws from Stream::kInit,
/// per-epoch batch order from Stream::kShuffle. Throws Error(kDivergence)
/// naming the epoch when the loss becomes non-finite.
TrainResult train(const Matrix& x, const Matrix& f, const TrainConfig& config);

/// Row i is forward(model, x_i).
Matrix recover(const LeModel& model, const Matrix& x);

/// Checkpoint: a header line `q=<q>,d_prime=<d'>,beta=<beta>` followed by q
/// comma-separated rows of W.
void save_model(const LeModel& model, const std::string& path);
LeModel load_model(const std::string& path);

}  // namespace lcdr
