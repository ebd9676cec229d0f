// Copyright 2026 The qpic authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QPIC_METRICS_HPP
#define QPIC_METRICS_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "qpic/dataset.hpp"
#include "qpic/nn.hpp"
#include "qpic/pic.hpp"

namespace qpic {

// sum_i |predicted_i - reference_i| / sum_i |reference_i|. Aggregate form:
// near-zero entries of the reference do not blow up the ratio.
double aggregate_relative_error(std::span<const double> predicted, std::span<const double> reference);

// Energy distance between two empirical samples,
//   D^2 = 2 E|U - V| - E|U - U'| - E|V - V'|,
// computed in the equivalent CDF form D = sqrt(2 integral (F_u - F_v)^2),
// which is O((m+n) log(m+n)) instead of O(m n).
double energy_distance(std::span<const double> u, std::span<const double> v);

struct WilcoxonResult {
    double statistic = 0.0;  // min(W+, W-)
    double p_value = 1.0;    // two-sided
    int n_used = 0;          // pairs left after dropping zero differences
};

// Paired two-sided Wilcoxon signed-rank test on the differences. Zero
// differences are dropped, tied |differences| get averaged ranks. Up to 12
// effective pairs the null distribution is enumerated exactly (2^n sign
// assignments); beyond that a tie-corrected normal approximation is used.
// Fewer than 6 effective pairs cannot reach p < 0.05 two-sided, so that is
// rejected as a degenerate input.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> differences);

struct Histogram {
    std::vector<double> edges;         // n_bins + 1
    std::vector<std::size_t> counts;   // sums to the sample count
    std::vector<double> density;       // integrates to 1 over [lo, hi]
};

// Out-of-range samples are clamped into the edge bins so the counts always
// sum to the sample size.
Histogram velocity_histogram(std::span<const double> v, int n_bins, double lo, double hi);

// Linear-interpolation quantile of unsorted data (the "type 7" rule:
// position (n-1) * p).
double quantile(std::span<const double> values, double p);

struct BoxStats {
    double median = 0.0;
    double q1 = 0.0;
    double q3 = 0.0;
    double whisker_lo = 0.0;  // smallest value within 1.5 IQR of q1
    double whisker_hi = 0.0;
    std::vector<double> outliers;
};

BoxStats summarize_errors(std::span<const double> values);

struct GrowthSummary {
    double growth_rate = 0.0;        // steepest least-squares slope of log(max|E|) vs time
    double saturation_level = 0.0;   // mean of max|E| over the last 20% of rows
};

// Scans every `window`-row span of the series and fits log(max_abs_E)
// against time; windows containing non-positive amplitudes are skipped.
GrowthSummary growth_summary(const DiagnosticsSeries& series, int window = 100);

// Per-sample aggregate relative error of the electric field derived from
// the model prediction, against the field derived from the true potential.
// Both fields come from the same central difference of the normalized
// potentials, so the per-frame scales cancel.
std::vector<double> model_field_errors(const ModelSpec& spec, std::span<const double> params, const Dataset& data);

}  // namespace qpic

#endif
