#pragma once

#include <string>
#include <vector>

#include "lcdr/types.hpp"

namespace lcdr {

enum class LabelKind { kDistribution, kLogical };

/// What the caller expects a file to hold. kAuto accepts either.
enum class ExpectedKind { kAuto, kDistribution, kLogical };

const char* to_string(LabelKind kind);

/// Instances are rows: features is n x d, labels is n x q.
struct Dataset {
  Matrix features;
  Matrix labels;
  LabelKind label_kind = LabelKind::kDistribution;
  std::vector<std::string> feature_names;
  std::vector<std::string> label_names;

  Index n() const { return features.rows(); }
  Index d() const { return features.cols(); }
  Index q() const { return labels.cols(); }
};

/// Labels-only view of a CSV (x_ columns, if any, are ignored).
struct LabelTable {
  Matrix values;
  std::vector<std::string> names;
};

/// Throws Error(kInvalidInput) naming the first offending row (1-based data
/// row) when `labels` is not a valid matrix of the given kind.
void validate_labels(const Matrix& labels, LabelKind kind);

/// Checks every Dataset invariant, including n >= 2, d >= 1, q >= 2.
void validate(const Dataset& data);

/// Reads a CSV whose header names feature columns `x_<name>` and label
/// columns `y_<name>`. The label kind is inferred: all entries in {0, 1}
/// means logical, except that a one-hot matrix is accepted as a distribution
/// when that is what the caller expects.
Dataset load_dataset(const std::string& path,
                     ExpectedKind expected = ExpectedKind::kAuto);

/// Reads only the y_ columns of a CSV. Rows must be valid distributions.
LabelTable load_distribution(const std::string& path);

/// l_ij = 1 iff value_ij > threshold. No fallback; see degrade().
Matrix binarize(const Matrix& values, double threshold);

/// Turns a distribution dataset into a logical one. Every row keeps its
/// argmax label (first index on ties) so no row ends up empty.
Dataset degrade(const Dataset& data, double threshold);

/// Writes a `y_`-prefixed CSV of a row-stochastic matrix (rows must sum to 1
/// within 1e-6). Values are written in shortest round-trip form.
void save_distribution(const Matrix& dist,
                       const std::vector<std::string>& label_names,
                       const std::string& path);

/// Writes features and labels back out in the load_dataset layout.
void save_dataset(const Dataset& data, const std::string& path);

/// Shortest decimal string that parses back to exactly `value`.
std::string format_double(double value);

}  // namespace lcdr
