#pragma once

#include <string>

#include "lcdr/types.hpp"

namespace lcdr {

using VectorRef = Eigen::Ref<const Vector>;

// Distances between a true distribution d and a recovered one d_hat. Terms of
// clark and canberra whose denominator d_j + d_hat_j is zero contribute 0.

double chebyshev(const VectorRef& d, const VectorRef& d_hat);
double clark(const VectorRef& d, const VectorRef& d_hat);
double canberra(const VectorRef& d, const VectorRef& d_hat);
/// sum_j d_j ln(d_j / d_hat_j) with 0 ln 0 = 0. Throws when d_j > 0 and
/// d_hat_j = 0 (the divergence is infinite).
double kl(const VectorRef& d, const VectorRef& d_hat);

// Similarities.

/// Throws on an all-zero argument.
double cosine(const VectorRef& d, const VectorRef& d_hat);
double intersection(const VectorRef& d, const VectorRef& d_hat);

/// Per-metric means over instances.
struct MetricReport {
  double chebyshev = 0.0;
  double clark = 0.0;
  double canberra = 0.0;
  double kl = 0.0;
  double cosine = 0.0;
  double intersection = 0.0;
  Index n_instances = 0;
};

/// Rows are instances. A failing row is reported by 1-based index.
MetricReport report(const Matrix& truth, const Matrix& predicted);

/// Flat JSON object keyed by the six metric names.
std::string to_json(const MetricReport& report);

/// One-line summary; intersection is appended only when requested.
std::string summary_line(const MetricReport& report, bool with_intersection);

/// scores(m, s) is method m's score on dataset s. Ranks are taken per
/// dataset (1 = best, tied methods share the mean of their ranks) and
/// averaged across datasets.
Vector average_ranks(const Matrix& scores, bool higher_is_better);

}  // namespace lcdr
