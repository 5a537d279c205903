#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lcdr/confidence.hpp"
#include "lcdr/dataset.hpp"
#include "lcdr/graph.hpp"
#include "lcdr/le_model.hpp"
#include "lcdr/metrics.hpp"

namespace lcdr {

enum class FeaturesVariant { kRaw, kReduced };
enum class TargetsVariant { kLogical, kConfidence };

/// Everything one enhancement run depends on. Two runs with equal configs
/// produce byte-identical output files.
struct ExperimentConfig {
  std::string input;
  /// Degradation threshold; 1/q when unset.
  std::optional<double> threshold;
  Index k = 10;
  SigmaMode sigma = SigmaMode::mean_knn_distance();
  double alpha = 0.1;
  /// Clamped to d when the data has fewer features.
  Index d_prime = 10;
  TrainConfig train;
  ConfidenceOptions confidence;
  FeaturesVariant features = FeaturesVariant::kReduced;
  TargetsVariant targets = TargetsVariant::kConfidence;
  std::uint64_t seed = 42;

  std::string out_dist;
  std::string out_metrics;
  std::string out_model;
  /// Reduced features and training targets, as a dataset CSV.
  std::string out_augmented;
};

/// Sets one field from its `key = value` spelling (the CLI flag name without
/// dashes, e.g. `d-prime`). Throws Error(kInvalidInput) for unknown keys or
/// unparsable values.
void apply_config_entry(ExperimentConfig& config, const std::string& key,
                        const std::string& value);

/// Reads `key = value` lines; blank lines and `#` comments are skipped.
std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path);

/// Zero mean and unit (population) variance per column; constant columns
/// become zero.
Matrix standardize_columns(const Matrix& x);

struct EnhanceResult {
  Matrix recovered;
  Matrix targets;   // what the regressor was fit to
  Matrix features;  // what the regressor saw
  Dataset logical;  // the logical-label dataset the run started from
  std::optional<MetricReport> metrics;
  bool confidence_converged = true;
  int training_epochs = 0;
};

/// standardize -> (degrade, for distribution input) -> graph -> confidence
/// -> projection -> train -> recover, then writes whichever outputs are
/// configured. Metrics are computed only when the input carries ground-truth
/// distributions. Errors are re-thrown with the failing stage prefixed.
EnhanceResult run_enhance(const ExperimentConfig& config, std::ostream* log = nullptr);

void run_degrade(const std::string& input, std::optional<double> threshold,
                 const std::string& output);

MetricReport run_eval(const std::string& predicted, const std::string& truth,
                      const std::string& output);

struct SynthConfig {
  Index n = 300;
  Index d = 20;
  Index q = 5;
  double noise = 0.5;
  std::uint64_t seed = 7;
};

/// Features are i.i.d. N(0, 1); labels are Softmax(G x + e) per instance with
/// G_ij ~ N(0, 1/d) drawn once and e ~ N(0, noise^2) per entry.
Dataset synthesize(const SynthConfig& config);

void run_synth(const SynthConfig& config, const std::string& output);

}  // namespace lcdr
