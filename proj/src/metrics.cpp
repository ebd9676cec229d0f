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

#include "qpic/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#include "qpic/errors.hpp"

namespace qpic {

double aggregate_relative_error(std::span<const double> predicted, std::span<const double> reference) {
    if (predicted.size() != reference.size() || predicted.empty()) {
        throw NumericError("relative error needs two equal-length non-empty vectors");
    }
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        num += std::abs(predicted[i] - reference[i]);
        den += std::abs(reference[i]);
    }
    if (den == 0.0) {
        throw NumericError("relative error undefined: reference is identically zero");
    }
    return num / den;
}

double energy_distance(std::span<const double> u, std::span<const double> v) {
    if (u.empty() || v.empty()) {
        throw NumericError("energy distance needs two non-empty samples");
    }
    std::vector<double> su(u.begin(), u.end());
    std::vector<double> sv(v.begin(), v.end());
    std::sort(su.begin(), su.end());
    std::sort(sv.begin(), sv.end());

    std::vector<double> all;
    all.reserve(su.size() + sv.size());
    all.insert(all.end(), su.begin(), su.end());
    all.insert(all.end(), sv.begin(), sv.end());
    std::sort(all.begin(), all.end());

    const double m = static_cast<double>(su.size());
    const double n = static_cast<double>(sv.size());
    double d2 = 0.0;
    for (std::size_t k = 0; k + 1 < all.size(); ++k) {
        const double gap = all[k + 1] - all[k];
        if (gap == 0.0) {
            continue;
        }
        const double fu = static_cast<double>(std::upper_bound(su.begin(), su.end(), all[k]) - su.begin()) / m;
        const double fv = static_cast<double>(std::upper_bound(sv.begin(), sv.end(), all[k]) - sv.begin()) / n;
        d2 += (fu - fv) * (fu - fv) * gap;
    }
    return std::sqrt(2.0 * d2);
}

WilcoxonResult wilcoxon_signed_rank(std::span<const double> differences) {
    std::vector<double> d;
    d.reserve(differences.size());
    for (double x : differences) {
        if (x != 0.0) {
            d.push_back(x);
        }
    }
    const int n = static_cast<int>(d.size());
    // Below 6 pairs even the extreme outcome has p = 2/2^5 > 0.05; treat
    // the test as degenerate rather than returning a meaningless number.
    if (n < 6) {
        throw NumericError("wilcoxon test needs at least 6 non-zero differences, got " + std::to_string(n));
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return std::abs(d[a]) < std::abs(d[b]); });

    // Average ranks over runs of tied |d|.
    std::vector<double> rank(n, 0.0);
    int i = 0;
    while (i < n) {
        int j = i;
        while (j + 1 < n && std::abs(d[order[j + 1]]) == std::abs(d[order[i]])) {
            ++j;
        }
        const double avg = 0.5 * static_cast<double>((i + 1) + (j + 1));
        for (int k = i; k <= j; ++k) {
            rank[order[k]] = avg;
        }
        i = j + 1;
    }

    double w_plus = 0.0;
    for (int k = 0; k < n; ++k) {
        if (d[k] > 0.0) {
            w_plus += rank[k];
        }
    }
    const double total = 0.5 * n * (n + 1);
    const double w_minus = total - w_plus;

    WilcoxonResult result;
    result.statistic = std::min(w_plus, w_minus);
    result.n_used = n;

    if (n <= 12) {
        // Exact null: every sign assignment is equally likely.
        const std::vector<double> sorted_ranks = [&] {
            std::vector<double> r(rank);
            std::sort(r.begin(), r.end());
            return r;
        }();
        const std::uint64_t total_masks = std::uint64_t{1} << n;
        std::uint64_t count_le = 0;
        std::uint64_t count_ge = 0;
        constexpr double eps = 1e-9;
        for (std::uint64_t mask = 0; mask < total_masks; ++mask) {
            double w = 0.0;
            for (int b = 0; b < n; ++b) {
                if ((mask >> b) & 1) {
                    w += sorted_ranks[b];
                }
            }
            if (w <= w_plus + eps) {
                ++count_le;
            }
            if (w >= w_plus - eps) {
                ++count_ge;
            }
        }
        const double tail = static_cast<double>(std::min(count_le, count_ge)) / static_cast<double>(total_masks);
        result.p_value = std::min(1.0, 2.0 * tail);
        return result;
    }

    // Normal approximation with the tie correction on the variance.
    const double mu = total / 2.0;
    double tie_term = 0.0;
    i = 0;
    std::vector<double> abs_sorted(n);
    for (int k = 0; k < n; ++k) {
        abs_sorted[k] = std::abs(d[k]);
    }
    std::sort(abs_sorted.begin(), abs_sorted.end());
    while (i < n) {
        int j = i;
        while (j + 1 < n && abs_sorted[j + 1] == abs_sorted[i]) {
            ++j;
        }
        const double t = static_cast<double>(j - i + 1);
        tie_term += t * t * t - t;
        i = j + 1;
    }
    const double var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0;
    if (!(var > 0.0)) {
        throw NumericError("wilcoxon variance vanished (all differences tied)");
    }
    const double z = (w_plus - mu) / std::sqrt(var);
    result.p_value = std::min(1.0, std::erfc(std::abs(z) / std::sqrt(2.0)));
    return result;
}

Histogram velocity_histogram(std::span<const double> v, int n_bins, double lo, double hi) {
    if (n_bins < 1) {
        throw ConfigError("histogram needs at least one bin");
    }
    if (!(hi > lo)) {
        throw ConfigError("histogram range must satisfy hi > lo");
    }
    if (v.empty()) {
        throw ConfigError("histogram needs a non-empty sample");
    }
    Histogram h;
    const double width = (hi - lo) / n_bins;
    h.edges.resize(n_bins + 1);
    for (int b = 0; b <= n_bins; ++b) {
        h.edges[b] = lo + b * width;
    }
    h.counts.assign(n_bins, 0);
    for (double x : v) {
        int idx = static_cast<int>(std::floor((x - lo) / width));
        idx = std::clamp(idx, 0, n_bins - 1);
        ++h.counts[idx];
    }
    h.density.resize(n_bins);
    const double norm = 1.0 / (static_cast<double>(v.size()) * width);
    for (int b = 0; b < n_bins; ++b) {
        h.density[b] = static_cast<double>(h.counts[b]) * norm;
    }
    return h;
}

namespace {

double quantile_sorted(const std::vector<double>& sorted, double p) {
    const std::size_t n = sorted.size();
    if (n == 1) {
        return sorted[0];
    }
    const double pos = p * static_cast<double>(n - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= n) {
        return sorted[n - 1];
    }
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace

double quantile(std::span<const double> values, double p) {
    if (values.empty()) {
        throw NumericError("quantile of an empty sample");
    }
    if (!(p >= 0.0 && p <= 1.0)) {
        throw ConfigError("quantile fraction must lie in [0, 1]");
    }
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    return quantile_sorted(sorted, p);
}

BoxStats summarize_errors(std::span<const double> values) {
    if (values.empty()) {
        throw NumericError("cannot summarize an empty sample");
    }
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());

    BoxStats box;
    box.q1 = quantile_sorted(sorted, 0.25);
    box.median = quantile_sorted(sorted, 0.5);
    box.q3 = quantile_sorted(sorted, 0.75);
    const double iqr = box.q3 - box.q1;
    const double fence_lo = box.q1 - 1.5 * iqr;
    const double fence_hi = box.q3 + 1.5 * iqr;

    box.whisker_lo = box.q1;
    box.whisker_hi = box.q3;
    for (double x : sorted) {
        if (x >= fence_lo) {
            box.whisker_lo = x;  // first in-fence value from below
            break;
        }
    }
    for (auto it = sorted.rbegin(); it != sorted.rend(); ++it) {
        if (*it <= fence_hi) {
            box.whisker_hi = *it;
            break;
        }
    }
    for (double x : sorted) {
        if (x < fence_lo || x > fence_hi) {
            box.outliers.push_back(x);
        }
    }
    return box;
}

GrowthSummary growth_summary(const DiagnosticsSeries& series, int window) {
    const int n = static_cast<int>(series.rows.size());
    if (window < 2) {
        throw ConfigError("growth window must span at least 2 rows");
    }
    if (n < window) {
        throw ConfigError("diagnostics series (" + std::to_string(n) + " rows) is shorter than the growth window (" +
                          std::to_string(window) + ")");
    }

    bool any_window = false;
    double best_slope = 0.0;
    for (int start = 0; start + window <= n; ++start) {
        bool positive = true;
        for (int k = start; k < start + window; ++k) {
            if (!(series.rows[k].max_abs_E > 0.0)) {
                positive = false;
                break;
            }
        }
        if (!positive) {
            continue;
        }
        double st = 0.0;
        double sy = 0.0;
        for (int k = start; k < start + window; ++k) {
            st += series.rows[k].time;
            sy += std::log(series.rows[k].max_abs_E);
        }
        const double mt = st / window;
        const double my = sy / window;
        double num = 0.0;
        double den = 0.0;
        for (int k = start; k < start + window; ++k) {
            const double dt = series.rows[k].time - mt;
            num += dt * (std::log(series.rows[k].max_abs_E) - my);
            den += dt * dt;
        }
        if (den == 0.0) {
            continue;
        }
        const double slope = num / den;
        if (!any_window || slope > best_slope) {
            best_slope = slope;
            any_window = true;
        }
    }
    if (!any_window) {
        throw NumericError("every growth window contains a non-positive amplitude");
    }

    GrowthSummary g;
    g.growth_rate = best_slope;
    const int tail = std::max(1, (n + 4) / 5);  // ceil(0.2 n)
    double sum = 0.0;
    for (int k = n - tail; k < n; ++k) {
        sum += series.rows[k].max_abs_E;
    }
    g.saturation_level = sum / tail;
    return g;
}

std::vector<double> model_field_errors(const ModelSpec& spec, std::span<const double> params, const Dataset& data) {
    if (data.samples.empty()) {
        throw ConfigError("cannot evaluate on an empty dataset");
    }
    std::vector<double> errors;
    errors.reserve(data.samples.size());
    for (const TrainSample& sample : data.samples) {
        const std::vector<double> pred = model_forward(spec, params, sample.rho_norm, nullptr);
        const std::size_t n = pred.size();
        std::vector<double> e_pred(n);
        std::vector<double> e_true(n);
        // Unit-spacing central difference; the common 1/(2 dx) factor and
        // the frame scale cancel inside the relative error.
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t prev = i == 0 ? n - 1 : i - 1;
            const std::size_t next = i + 1 == n ? 0 : i + 1;
            e_pred[i] = -(pred[next] - pred[prev]);
            e_true[i] = -(sample.phi_norm[next] - sample.phi_norm[prev]);
        }
        errors.push_back(aggregate_relative_error(e_pred, e_true));
    }
    return errors;
}

}  // namespace qpic
