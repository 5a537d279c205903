// lcdr: label enhancement from logical labels.
//
//   lcdr enhance --input data.csv --out-dist recovered.csv --out-metrics report.json
//   lcdr degrade --input data.csv --threshold 0.25 --output logical.csv
//   lcdr eval    --pred recovered.csv --truth data.csv --output report.json
//   lcdr synth   --n 300 --d 20 --q 5 --noise 0.5 --seed 7 --output synth.csv
//
// Exit codes: 0 success, 2 invalid input, 3 infeasible constraints,
// 4 training divergence, 1 I/O failure.

#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "lcdr/error.hpp"
#include "lcdr/pipeline.hpp"

namespace {

struct FlagSpec {
  const char* key;
  const char* help;
};

// Every enhance flag is also a config-file key of the same name.
constexpr FlagSpec kEnhanceFlags[] = {
    {"input", "Dataset CSV (x_ feature columns, y_ label columns)"},
    {"threshold", "Degradation threshold in (0,1); default 1/q"},
    {"k", "Neighbors per instance (default 10)"},
    {"sigma", "Gaussian bandwidth, or 'mean-knn' (default)"},
    {"alpha", "Trade-off in the projection constraint (default 0.1)"},
    {"d-prime", "Reduced dimension (default 10, clamped to d)"},
    {"beta", "Weight penalty of the regressor (default 0.1)"},
    {"seed", "Seed for initialization and shuffling (default 42)"},
    {"learning-rate", "SGD learning rate (default 0.01)"},
    {"momentum", "SGD momentum (default 0.9)"},
    {"weight-decay", "SGD weight decay (default 5e-4)"},
    {"batch-size", "Mini-batch size (default 32)"},
    {"max-epochs", "Epoch cap (default 500)"},
    {"converge-tol", "Stop when the per-instance loss moves less (default 1e-6)"},
    {"confidence-tol", "Confidence solver tolerance (default 1e-7)"},
    {"confidence-max-iter", "Confidence solver iteration cap (default 5000)"},
    {"features", "raw | reduced (default reduced)"},
    {"targets", "logical | confidence (default confidence)"},
    {"out-dist", "Recovered distribution CSV"},
    {"out-metrics", "Metric report JSON (distribution input only)"},
    {"out-model", "Model checkpoint CSV"},
    {"out-augmented", "Reduced features and training targets CSV"},
};

int fail(const lcdr::Error& e) {
  std::cerr << "lcdr: error: " << e.what() << '\n';
  return e.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Recover label distributions from logical labels"};
  app.require_subcommand(1);

  auto* enhance = app.add_subcommand("enhance", "Run the full recovery pipeline");
  std::string config_path;
  bool enhance_intersection = false;
  enhance->add_option("--config", config_path, "key = value file; flags override it");
  enhance->add_flag("--intersection", enhance_intersection,
                    "Include intersection in the printed summary");
  std::map<std::string, std::string> enhance_values;
  for (const auto& flag : kEnhanceFlags) {
    enhance->add_option(std::string("--") + flag.key, enhance_values[flag.key], flag.help);
  }

  auto* degrade = app.add_subcommand("degrade", "Threshold a distribution dataset");
  std::string degrade_input;
  std::string degrade_output;
  std::optional<double> degrade_threshold;
  degrade->add_option("--input", degrade_input)->required();
  degrade->add_option("--threshold", degrade_threshold, "In (0,1); default 1/q");
  degrade->add_option("--output", degrade_output)->required();

  auto* eval = app.add_subcommand("eval", "Score recovered distributions");
  std::string pred_path;
  std::string truth_path;
  std::string eval_output;
  bool eval_intersection = false;
  eval->add_option("--pred", pred_path)->required();
  eval->add_option("--truth", truth_path)->required();
  eval->add_option("--output", eval_output);
  eval->add_flag("--intersection", eval_intersection,
                 "Include intersection in the printed summary");

  auto* synth = app.add_subcommand("synth", "Generate a synthetic distribution dataset");
  lcdr::SynthConfig synth_config;
  std::string synth_output;
  synth->add_option("--n", synth_config.n)->capture_default_str();
  synth->add_option("--d", synth_config.d)->capture_default_str();
  synth->add_option("--q", synth_config.q)->capture_default_str();
  synth->add_option("--noise", synth_config.noise)->capture_default_str();
  synth->add_option("--seed", synth_config.seed)->capture_default_str();
  synth->add_option("--output", synth_output)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*enhance) {
      lcdr::ExperimentConfig config;
      if (!config_path.empty()) {
        for (const auto& [key, value] : lcdr::read_config_file(config_path)) {
          lcdr::apply_config_entry(config, key, value);
        }
      }
      for (const auto& flag : kEnhanceFlags) {
        if (enhance->get_option(std::string("--") + flag.key)->count() > 0) {
          lcdr::apply_config_entry(config, flag.key, enhance_values[flag.key]);
        }
      }
      if (config.input.empty()) throw lcdr::invalid_input("--input is required");
      const auto result = lcdr::run_enhance(config, &std::cerr);
      if (result.metrics) {
        std::cout << lcdr::summary_line(*result.metrics, enhance_intersection) << '\n';
      }
    } else if (*degrade) {
      lcdr::run_degrade(degrade_input, degrade_threshold, degrade_output);
    } else if (*eval) {
      const auto metrics = lcdr::run_eval(pred_path, truth_path, eval_output);
      std::cout << lcdr::summary_line(metrics, eval_intersection) << '\n';
    } else if (*synth) {
      lcdr::run_synth(synth_config, synth_output);
    }
  } catch (const lcdr::Error& e) {
    return fail(e);
  } catch (const std::exception& e) {
    std::cerr << "lcdr: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
