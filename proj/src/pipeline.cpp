#include "lcdr/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>

#include "lcdr/error.hpp"
#include "lcdr/hsic_dr.hpp"
#include "lcdr/random.hpp"

namespace lcdr {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double to_real(const std::string& key, const std::string& value) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size() || !std::isfinite(out)) {
    throw invalid_input("config '" + key + "': expected a number, got '" + value + "'");
  }
  return out;
}

long long to_integer(const std::string& key, const std::string& value) {
  long long out = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw invalid_input("config '" + key + "': expected an integer, got '" + value + "'");
  }
  return out;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"input", [](auto& c, auto&, auto& v) { c.input = v; }},
      {"threshold", [](auto& c, auto& k, auto& v) { c.threshold = to_real(k, v); }},
      {"k", [](auto& c, auto& k, auto& v) { c.k = to_integer(k, v); }},
      {"sigma",
       [](auto& c, auto& k, auto& v) {
         c.sigma = (v == "mean-knn") ? SigmaMode::mean_knn_distance()
                                     : SigmaMode::fixed(to_real(k, v));
       }},
      {"alpha", [](auto& c, auto& k, auto& v) { c.alpha = to_real(k, v); }},
      {"d-prime", [](auto& c, auto& k, auto& v) { c.d_prime = to_integer(k, v); }},
      {"beta", [](auto& c, auto& k, auto& v) { c.train.beta = to_real(k, v); }},
      {"seed",
       [](auto& c, auto& k, auto& v) {
         c.seed = static_cast<std::uint64_t>(to_integer(k, v));
       }},
      {"learning-rate",
       [](auto& c, auto& k, auto& v) { c.train.learning_rate = to_real(k, v); }},
      {"momentum", [](auto& c, auto& k, auto& v) { c.train.momentum = to_real(k, v); }},
      {"weight-decay",
       [](auto& c, auto& k, auto& v) { c.train.weight_decay = to_real(k, v); }},
      {"batch-size",
       [](auto& c, auto& k, auto& v) { c.train.batch_size = to_integer(k, v); }},
      {"max-epochs",
       [](auto& c, auto& k, auto& v) {
         c.train.max_epochs = static_cast<int>(to_integer(k, v));
       }},
      {"converge-tol",
       [](auto& c, auto& k, auto& v) { c.train.converge_tol = to_real(k, v); }},
      {"confidence-tol",
       [](auto& c, auto& k, auto& v) { c.confidence.tol = to_real(k, v); }},
      {"confidence-max-iter",
       [](auto& c, auto& k, auto& v) {
         c.confidence.max_iter = static_cast<int>(to_integer(k, v));
       }},
      {"features",
       [](auto& c, auto& k, auto& v) {
         if (v == "raw") c.features = FeaturesVariant::kRaw;
         else if (v == "reduced") c.features = FeaturesVariant::kReduced;
         else throw invalid_input("config '" + k + "': expected raw or reduced");
       }},
      {"targets",
       [](auto& c, auto& k, auto& v) {
         if (v == "logical") c.targets = TargetsVariant::kLogical;
         else if (v == "confidence") c.targets = TargetsVariant::kConfidence;
         else throw invalid_input("config '" + k + "': expected logical or confidence");
       }},
      {"out-dist", [](auto& c, auto&, auto& v) { c.out_dist = v; }},
      {"out-metrics", [](auto& c, auto&, auto& v) { c.out_metrics = v; }},
      {"out-model", [](auto& c, auto&, auto& v) { c.out_model = v; }},
      {"out-augmented", [](auto& c, auto&, auto& v) { c.out_augmented = v; }},
  };
  return table;
}

template <typename Fn>
auto stage(const char* name, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.kind(), std::string(name) + ": " + e.what());
  }
}

void note(std::ostream* log, const std::string& line) {
  if (log) *log << "[lcdr] " << line << '\n';
}

}  // namespace

void apply_config_entry(ExperimentConfig& config, const std::string& key,
                        const std::string& value) {
  const auto it = setters().find(key);
  if (it == setters().end()) throw invalid_input("unknown config key '" + key + "'");
  it->second(config, key, value);
}

std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw invalid_input("cannot open config '" + path + "'");
  std::vector<std::pair<std::string, std::string>> entries;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw invalid_input(path + ":" + std::to_string(line_no) + ": expected key = value");
    }
    entries.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return entries;
}

Matrix standardize_columns(const Matrix& x) {
  Matrix out = x;
  const double n = static_cast<double>(x.rows());
  for (Index j = 0; j < x.cols(); ++j) {
    auto col = out.col(j);
    const double mean = col.mean();
    col.array() -= mean;
    const double sd = std::sqrt(col.squaredNorm() / n);
    if (sd > 0.0 && sd > 1e-12 * std::max(1.0, std::abs(mean))) {
      col /= sd;
    } else {
      col.setZero();
    }
  }
  return out;
}

EnhanceResult run_enhance(const ExperimentConfig& config, std::ostream* log) {
  EnhanceResult result;

  const Dataset input = stage("load", [&] { return load_dataset(config.input); });
  note(log, "loaded " + config.input + ": n=" + std::to_string(input.n()) +
                " d=" + std::to_string(input.d()) + " q=" + std::to_string(input.q()) +
                " (" + to_string(input.label_kind) + ")");

  const Matrix x = standardize_columns(input.features);

  if (input.label_kind == LabelKind::kDistribution) {
    const double threshold = config.threshold.value_or(1.0 / static_cast<double>(input.q()));
    result.logical = stage("degrade", [&] { return degrade(input, threshold); });
    note(log, "degraded at threshold " + format_double(threshold));
  } else {
    result.logical = input;
  }
  const Matrix& logical = result.logical.labels;

  ConfidenceMatrix confidence;
  if (config.targets == TargetsVariant::kConfidence) {
    const auto graph = stage("graph", [&] { return build_graph(x, config.k, config.sigma); });
    const auto smoother = stage("confidence", [&] { return build_smoother(graph); });
    auto solved = stage("confidence", [&] {
      return solve_confidence(smoother, logical, config.confidence);
    });
    result.confidence_converged = solved.converged;
    if (!solved.converged) {
      note(log, "warning: confidence solver stopped at max_iter=" +
                    std::to_string(config.confidence.max_iter) + " before tol");
    }
    note(log, "confidence: " + std::to_string(solved.iterations) + " iterations, objective " +
                  format_double(solved.objective()));
    confidence = std::move(solved.confidence);
  } else {
    // Row-normalized logical labels.
    confidence = stage("targets", [&] { return init_confidence(logical); });
  }
  result.targets = confidence.values;

  if (config.features == FeaturesVariant::kReduced) {
    const Index d_prime = std::min(config.d_prime, x.cols());
    const auto projection = stage("projection", [&] {
      return solve_projection(x, label_kernel(confidence.values), config.alpha, d_prime);
    });
    result.features = project(x, projection);
    note(log, "projected to d'=" + std::to_string(d_prime));
  } else {
    result.features = x;
  }

  TrainConfig train_config = config.train;
  train_config.seed = config.seed;
  const auto trained =
      stage("train", [&] { return train(result.features, result.targets, train_config); });
  result.training_epochs = trained.epochs;
  note(log, "trained " + std::to_string(trained.epochs) + " epochs, loss/n " +
                format_double(trained.epoch_loss.back()));

  result.recovered = recover(trained.model, result.features);

  if (input.label_kind == LabelKind::kDistribution) {
    result.metrics = stage("evaluate", [&] { return report(input.labels, result.recovered); });
    note(log, summary_line(*result.metrics, false));
  }

  stage("write", [&] {
    if (!config.out_dist.empty()) {
      save_distribution(result.recovered, input.label_names, config.out_dist);
    }
    if (!config.out_metrics.empty()) {
      if (!result.metrics) {
        note(log, "no ground-truth distributions; skipping " + config.out_metrics);
      } else {
        std::ofstream out(config.out_metrics, std::ios::binary | std::ios::trunc);
        out << to_json(*result.metrics);
        if (!out) throw Error(ErrorKind::kIo, "cannot write '" + config.out_metrics + "'");
      }
    }
    if (!config.out_model.empty()) save_model(trained.model, config.out_model);
    if (!config.out_augmented.empty()) {
      Dataset augmented;
      augmented.features = result.features;
      augmented.labels = result.targets;
      augmented.label_kind = LabelKind::kDistribution;
      for (Index j = 0; j < result.features.cols(); ++j) {
        augmented.feature_names.push_back(config.features == FeaturesVariant::kReduced
                                              ? "p" + std::to_string(j + 1)
                                              : input.feature_names[j]);
      }
      augmented.label_names = input.label_names;
      save_dataset(augmented, config.out_augmented);
    }
    return 0;
  });
  return result;
}

void run_degrade(const std::string& input, std::optional<double> threshold,
                 const std::string& output) {
  const Dataset data = stage("load", [&] {
    return load_dataset(input, ExpectedKind::kDistribution);
  });
  const Dataset logical = stage("degrade", [&] {
    return degrade(data, threshold.value_or(1.0 / static_cast<double>(data.q())));
  });
  stage("write", [&] {
    save_dataset(logical, output);
    return 0;
  });
}

MetricReport run_eval(const std::string& predicted, const std::string& truth,
                      const std::string& output) {
  const LabelTable pred = stage("load", [&] { return load_distribution(predicted); });
  const LabelTable ref = stage("load", [&] { return load_distribution(truth); });
  const MetricReport metrics = stage("evaluate", [&] { return report(ref.values, pred.values); });
  if (!output.empty()) {
    std::ofstream out(output, std::ios::binary | std::ios::trunc);
    out << to_json(metrics);
    if (!out) throw Error(ErrorKind::kIo, "write: cannot write '" + output + "'");
  }
  return metrics;
}

Dataset synthesize(const SynthConfig& config) {
  if (config.n < 10) throw invalid_input("synth: n must be >= 10");
  if (config.d < 1) throw invalid_input("synth: d must be >= 1");
  if (config.q < 2) throw invalid_input("synth: q must be >= 2");
  if (!(config.noise >= 0.0)) throw invalid_input("synth: noise must be >= 0");

  Rng rng(config.seed, Stream::kSynth);
  Dataset data;
  data.features.resize(config.n, config.d);
  for (Index i = 0; i < config.n; ++i) {
    for (Index j = 0; j < config.d; ++j) data.features(i, j) = rng.normal();
  }
  Matrix g(config.q, config.d);
  const double scale = 1.0 / std::sqrt(static_cast<double>(config.d));
  for (Index r = 0; r < config.q; ++r) {
    for (Index j = 0; j < config.d; ++j) g(r, j) = scale * rng.normal();
  }
  Matrix logits = data.features * g.transpose();
  for (Index i = 0; i < config.n; ++i) {
    for (Index r = 0; r < config.q; ++r) logits(i, r) += config.noise * rng.normal();
  }
  data.labels.resize(config.n, config.q);
  for (Index i = 0; i < config.n; ++i) {
    auto row = logits.row(i);
    const Eigen::RowVectorXd e = (row.array() - row.maxCoeff()).exp();
    data.labels.row(i) = e / e.sum();
  }
  data.label_kind = LabelKind::kDistribution;
  for (Index j = 0; j < config.d; ++j) data.feature_names.push_back(std::to_string(j + 1));
  for (Index r = 0; r < config.q; ++r) data.label_names.push_back(std::to_string(r + 1));
  return data;
}

void run_synth(const SynthConfig& config, const std::string& output) {
  const Dataset data = synthesize(config);
  stage("write", [&] {
    save_dataset(data, output);
    return 0;
  });
}

}  // namespace lcdr
