#include "lcdr/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string_view>

#include "lcdr/error.hpp"

namespace lcdr {

namespace {

constexpr double kRowSumTolerance = 1e-9;

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

double parse_double(std::string_view field, std::size_t row, std::size_t col) {
  field = trim(field);
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
    throw invalid_input("row " + std::to_string(row) + ": malformed value '" +
                        std::string(field) + "' in column " +
                        std::to_string(col + 1));
  }
  if (!std::isfinite(value)) {
    throw invalid_input("row " + std::to_string(row) + ": non-finite value in column " +
                        std::to_string(col + 1));
  }
  return value;
}

struct RawTable {
  std::vector<std::string> feature_names;
  std::vector<std::string> label_names;
  std::vector<std::size_t> feature_cols;
  std::vector<std::size_t> label_cols;
  Matrix features;
  Matrix labels;
};

RawTable read_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw invalid_input("cannot open '" + path + "'");

  RawTable table;
  std::string line;
  if (!std::getline(in, line)) throw invalid_input("'" + path + "' is empty");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);

  const auto header = split_commas(line);
  for (std::size_t c = 0; c < header.size(); ++c) {
    const auto name = trim(header[c]);
    if (name.starts_with("x_")) {
      table.feature_cols.push_back(c);
      table.feature_names.emplace_back(name.substr(2));
    } else if (name.starts_with("y_")) {
      table.label_cols.push_back(c);
      table.label_names.emplace_back(name.substr(2));
    } else {
      throw invalid_input("header column " + std::to_string(c + 1) + " ('" +
                          std::string(name) + "') has neither x_ nor y_ prefix");
    }
  }

  std::vector<double> feats;
  std::vector<double> labs;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++rows;
    const auto fields = split_commas(line);
    if (fields.size() != header.size()) {
      throw invalid_input("row " + std::to_string(rows) + ": expected " +
                          std::to_string(header.size()) + " fields, got " +
                          std::to_string(fields.size()));
    }
    for (auto c : table.feature_cols) feats.push_back(parse_double(fields[c], rows, c));
    for (auto c : table.label_cols) labs.push_back(parse_double(fields[c], rows, c));
  }

  const auto n = static_cast<Index>(rows);
  const auto d = static_cast<Index>(table.feature_cols.size());
  const auto q = static_cast<Index>(table.label_cols.size());
  table.features = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                            Eigen::RowMajor>>(feats.data(), n, d);
  table.labels = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                          Eigen::RowMajor>>(labs.data(), n, q);
  return table;
}

bool all_binary(const Matrix& m) {
  return (m.array() == 0.0 || m.array() == 1.0).all();
}

std::string row_error(Index i, const std::string& what) {
  return "row " + std::to_string(i + 1) + " " + what;
}

std::string short_number(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

const char* to_string(LabelKind kind) {
  return kind == LabelKind::kLogical ? "logical" : "distribution";
}

void validate_labels(const Matrix& labels, LabelKind kind) {
  for (Index i = 0; i < labels.rows(); ++i) {
    const auto row = labels.row(i);
    if (!row.allFinite()) throw invalid_input(row_error(i, "has a non-finite entry"));
    if (kind == LabelKind::kLogical) {
      for (Index j = 0; j < row.size(); ++j) {
        if (row(j) != 0.0 && row(j) != 1.0) {
          throw invalid_input(row_error(i, "has non-binary logical entry " +
                                               short_number(row(j))));
        }
      }
      if (row.sum() == 0.0) throw invalid_input(row_error(i, "has no positive label"));
    } else {
      if ((row.array() < 0.0).any() || (row.array() > 1.0).any()) {
        throw invalid_input(row_error(i, "has an entry outside [0, 1]"));
      }
      const double sum = row.sum();
      if (std::abs(sum - 1.0) > kRowSumTolerance) {
        throw invalid_input(row_error(i, "sums to " + short_number(sum)));
      }
    }
  }
}

void validate(const Dataset& data) {
  if (data.n() < 2) throw invalid_input("dataset needs at least 2 instances");
  if (data.d() < 1) throw invalid_input("dataset needs at least 1 feature column");
  if (data.q() < 2) throw invalid_input("dataset needs at least 2 label columns");
  if (data.labels.rows() != data.n()) {
    throw invalid_input("feature and label row counts differ");
  }
  for (Index i = 0; i < data.n(); ++i) {
    if (!data.features.row(i).allFinite()) {
      throw invalid_input(row_error(i, "has a non-finite feature"));
    }
  }
  validate_labels(data.labels, data.label_kind);
}

Dataset load_dataset(const std::string& path, ExpectedKind expected) {
  RawTable table = read_table(path);
  Dataset data;
  data.features = std::move(table.features);
  data.labels = std::move(table.labels);
  data.feature_names = std::move(table.feature_names);
  data.label_names = std::move(table.label_names);

  const bool binary = all_binary(data.labels);
  switch (expected) {
    case ExpectedKind::kAuto:
      data.label_kind = binary ? LabelKind::kLogical : LabelKind::kDistribution;
      break;
    case ExpectedKind::kDistribution:
      data.label_kind = LabelKind::kDistribution;
      break;
    case ExpectedKind::kLogical:
      if (!binary) {
        throw invalid_input("'" + path + "' holds distribution labels, expected logical");
      }
      data.label_kind = LabelKind::kLogical;
      break;
  }
  validate(data);
  return data;
}

LabelTable load_distribution(const std::string& path) {
  RawTable table = read_table(path);
  if (table.labels.cols() < 1) throw invalid_input("'" + path + "' has no y_ columns");
  if (table.labels.rows() < 1) throw invalid_input("'" + path + "' has no data rows");
  validate_labels(table.labels, LabelKind::kDistribution);
  return {std::move(table.labels), std::move(table.label_names)};
}

Matrix binarize(const Matrix& values, double threshold) {
  return (values.array() > threshold).cast<double>().matrix();
}

Dataset degrade(const Dataset& data, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw invalid_input("degradation threshold must lie in (0, 1), got " +
                        short_number(threshold));
  }
  if (data.label_kind != LabelKind::kDistribution) {
    throw invalid_input("degrade needs a distribution dataset");
  }
  Dataset out = data;
  out.labels = binarize(data.labels, threshold);
  for (Index i = 0; i < out.labels.rows(); ++i) {
    Index best = 0;
    data.labels.row(i).maxCoeff(&best);  // first index on ties
    out.labels(i, best) = 1.0;
  }
  out.label_kind = LabelKind::kLogical;
  return out;
}

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  (void)ec;
  return std::string(buf, ptr);
}

namespace {

void write_or_throw(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw Error(ErrorKind::kIo, "failed writing '" + path + "'");
}

std::ofstream open_for_write(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot write '" + path + "'");
  return out;
}

}  // namespace

void save_distribution(const Matrix& dist, const std::vector<std::string>& label_names,
                       const std::string& path) {
  if (static_cast<Index>(label_names.size()) != dist.cols()) {
    throw invalid_input("label name count does not match column count");
  }
  for (Index i = 0; i < dist.rows(); ++i) {
    const double sum = dist.row(i).sum();
    if (!std::isfinite(sum) || std::abs(sum - 1.0) > 1e-6) {
      throw invalid_input(row_error(i, "sums to " + short_number(sum) +
                                           "; not a distribution"));
    }
  }
  auto out = open_for_write(path);
  for (std::size_t j = 0; j < label_names.size(); ++j) {
    out << (j ? "," : "") << "y_" << label_names[j];
  }
  out << '\n';
  for (Index i = 0; i < dist.rows(); ++i) {
    for (Index j = 0; j < dist.cols(); ++j) {
      out << (j ? "," : "") << format_double(dist(i, j));
    }
    out << '\n';
  }
  write_or_throw(out, path);
}

void save_dataset(const Dataset& data, const std::string& path) {
  auto out = open_for_write(path);
  bool first = true;
  for (const auto& name : data.feature_names) {
    out << (first ? "" : ",") << "x_" << name;
    first = false;
  }
  for (const auto& name : data.label_names) {
    out << (first ? "" : ",") << "y_" << name;
    first = false;
  }
  out << '\n';
  for (Index i = 0; i < data.n(); ++i) {
    first = true;
    for (Index j = 0; j < data.d(); ++j) {
      out << (first ? "" : ",") << format_double(data.features(i, j));
      first = false;
    }
    for (Index j = 0; j < data.q(); ++j) {
      out << (first ? "" : ",") << format_double(data.labels(i, j));
      first = false;
    }
    out << '\n';
  }
  write_or_throw(out, path);
}

}  // namespace lcdr
