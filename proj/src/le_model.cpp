#include "lcdr/le_model.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "lcdr/dataset.hpp"
#include "lcdr/error.hpp"
#include "lcdr/random.hpp"

namespace lcdr {

namespace {

void check_shapes(const LeModel& model, const Matrix& x, const Matrix& f) {
  if (x.cols() != model.d_prime()) {
    throw invalid_input("features have " + std::to_string(x.cols()) +
                        " columns, model expects " + std::to_string(model.d_prime()));
  }
  if (f.rows() != x.rows() || f.cols() != model.q()) {
    throw invalid_input("targets must be " + std::to_string(x.rows()) + " x " +
                        std::to_string(model.q()));
  }
}

/// Row-wise Softmax(ReLU(Z)) for pre-activations z (n x q).
Matrix softmax_relu(const Matrix& z) {
  Matrix p = z.cwiseMax(0.0);
  for (Index i = 0; i < p.rows(); ++i) {
    auto row = p.row(i);
    row.array() = (row.array() - row.maxCoeff()).exp();
    row /= row.sum();
  }
  return p;
}

/// Gradient of sum_i |f_i - p_i|^2 with respect to W, without the penalty.
Matrix data_gradient(const Matrix& weights, const Matrix& x, const Matrix& f) {
  const Matrix z = x * weights.transpose();
  const Matrix p = softmax_relu(z);
  const Matrix dp = -2.0 * (f - p);
  // Softmax Jacobian-vector product: p * (dp - <p, dp>).
  const Vector inner = p.cwiseProduct(dp).rowwise().sum();
  Matrix dz = p.cwiseProduct(dp.colwise() - inner);
  dz = dz.cwiseProduct((z.array() > 0.0).cast<double>().matrix());
  return dz.transpose() * x;
}

double data_loss(const Matrix& weights, const Matrix& x, const Matrix& f) {
  return (f - softmax_relu(x * weights.transpose())).squaredNorm();
}

}  // namespace

void validate(const TrainConfig& config) {
  if (!(config.learning_rate > 0.0)) throw invalid_input("learning_rate must be > 0");
  if (!(config.momentum >= 0.0 && config.momentum < 1.0)) {
    throw invalid_input("momentum must lie in [0, 1)");
  }
  if (config.batch_size < 1) throw invalid_input("batch_size must be >= 1");
  if (config.max_epochs < 0) throw invalid_input("max_epochs must be >= 0");
  if (!(config.weight_decay >= 0.0)) throw invalid_input("weight_decay must be >= 0");
  if (!(config.beta >= 0.0)) throw invalid_input("beta must be >= 0");
  if (!(config.converge_tol >= 0.0)) throw invalid_input("converge_tol must be >= 0");
  if (!(config.init_scale >= 0.0)) throw invalid_input("init_scale must be >= 0");
}

Vector forward(const LeModel& model, const Vector& x) {
  if (x.size() != model.d_prime()) {
    throw invalid_input("forward: input has length " + std::to_string(x.size()) +
                        ", model expects " + std::to_string(model.d_prime()));
  }
  if (!x.allFinite()) throw invalid_input("forward: non-finite input");
  const Matrix z = (model.weights * x).transpose();
  return softmax_relu(z).transpose();
}

double loss(const LeModel& model, const Matrix& x, const Matrix& f) {
  check_shapes(model, x, f);
  return data_loss(model.weights, x, f) + model.beta * model.weights.squaredNorm();
}

Matrix gradient(const LeModel& model, const Matrix& x, const Matrix& f) {
  check_shapes(model, x, f);
  return data_gradient(model.weights, x, f) + 2.0 * model.beta * model.weights;
}

TrainResult train(const Matrix& x, const Matrix& f, const TrainConfig& config) {
  validate(config);
  const Index n = x.rows();
  const Index q = f.cols();
  if (n < 1) throw invalid_input("train: no instances");
  if (f.rows() != n) throw invalid_input("train: feature and target row counts differ");

  TrainResult result;
  LeModel& model = result.model;
  model.beta = config.beta;
  model.weights.resize(q, x.cols());
  Rng init(config.seed, Stream::kInit);
  for (Index r = 0; r < q; ++r) {
    for (Index c = 0; c < x.cols(); ++c) {
      model.weights(r, c) = init.uniform(-config.init_scale, config.init_scale);
    }
  }

  const double inv_n = 1.0 / static_cast<double>(n);
  result.epoch_loss.push_back(loss(model, x, f) * inv_n);

  Rng shuffle(config.seed, Stream::kShuffle);
  Matrix velocity = Matrix::Zero(q, x.cols());
  const Index batch = std::min(config.batch_size, n);
  Matrix xb(batch, x.cols());
  Matrix fb(batch, q);

  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    const auto order = shuffle.permutation(static_cast<std::size_t>(n));
    for (Index start = 0; start < n; start += batch) {
      const Index size = std::min(batch, n - start);
      for (Index r = 0; r < size; ++r) {
        const auto row = static_cast<Index>(order[static_cast<std::size_t>(start + r)]);
        xb.row(r) = x.row(row);
        fb.row(r) = f.row(row);
      }
      Matrix step = data_gradient(model.weights, xb.topRows(size), fb.topRows(size)) /
                    static_cast<double>(size);
      step += (2.0 * config.beta * inv_n + config.weight_decay) * model.weights;
      velocity = config.momentum * velocity + step;
      model.weights -= config.learning_rate * velocity;
    }

    const double epoch_loss = loss(model, x, f) * inv_n;
    if (!std::isfinite(epoch_loss) || !model.weights.allFinite()) {
      throw Error(ErrorKind::kDivergence,
                  "training diverged at epoch " + std::to_string(epoch));
    }
    result.epochs = epoch;
    const double change = std::abs(epoch_loss - result.epoch_loss.back());
    result.epoch_loss.push_back(epoch_loss);
    if (change <= config.converge_tol) {
      result.converged = true;
      break;
    }
  }
  return result;
}

Matrix recover(const LeModel& model, const Matrix& x) {
  if (x.cols() != model.d_prime()) {
    throw invalid_input("recover: features have " + std::to_string(x.cols()) +
                        " columns, model expects " + std::to_string(model.d_prime()));
  }
  return softmax_relu(x * model.weights.transpose());
}

void save_model(const LeModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot write '" + path + "'");
  out << "q=" << model.q() << ",d_prime=" << model.d_prime()
      << ",beta=" << format_double(model.beta) << '\n';
  for (Index r = 0; r < model.q(); ++r) {
    for (Index c = 0; c < model.d_prime(); ++c) {
      out << (c ? "," : "") << format_double(model.weights(r, c));
    }
    out << '\n';
  }
  out.flush();
  if (!out) throw Error(ErrorKind::kIo, "failed writing '" + path + "'");
}

LeModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw invalid_input("cannot open '" + path + "'");
  std::string header;
  std::getline(in, header);
  long q = 0;
  long d_prime = 0;
  double beta = 0.0;
  if (std::sscanf(header.c_str(), "q=%ld,d_prime=%ld,beta=%lf", &q, &d_prime, &beta) != 3 ||
      q < 1 || d_prime < 1) {
    throw invalid_input("'" + path + "': malformed model header");
  }
  LeModel model;
  model.beta = beta;
  model.weights.resize(q, d_prime);
  std::string line;
  for (long r = 0; r < q; ++r) {
    if (!std::getline(in, line)) throw invalid_input("'" + path + "': missing weight rows");
    std::istringstream fields(line);
    std::string cell;
    for (long c = 0; c < d_prime; ++c) {
      if (!std::getline(fields, cell, ',')) {
        throw invalid_input("'" + path + "': row " + std::to_string(r + 1) + " is short");
      }
      double value = 0.0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
      if (ec != std::errc() || ptr != cell.data() + cell.size()) {
        throw invalid_input("'" + path + "': malformed weight '" + cell + "'");
      }
      model.weights(r, c) = value;
    }
  }
  return model;
}

}  // namespace lcdr
