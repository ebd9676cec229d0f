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

#ifndef QPIC_TRAIN_HPP
#define QPIC_TRAIN_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "qpic/dataset.hpp"
#include "qpic/nn.hpp"

namespace qpic {

enum class LossKind {
    data,  // mean absolute error against the normalized potential at the anchors
    pinn,  // stencil residual plus a sparse data anchor
};

// The stencil residual can carry its physical scales (s_phi / s_rho and
// the real dx) or be evaluated in bare index space (unit c, unit dx).
enum class ResidualConvention {
    physical,
    normalized_index,
};

struct TrainConfig {
    LossKind loss = LossKind::data;
    double lambda = 0.0;  // weight of the sparse data term in the pinn loss
    // Anchor count N_d of the data term (both losses). For the data loss,
    // values at or above the grid width mean "every point" (dense); smaller
    // values restrict the error to sparse_select(N_d) probe locations.
    int n_data_points = 64;
    double learning_rate = 1e-3;
    int epochs = 0;
    int workers = 1;
    std::uint64_t seed = 1;
    ResidualConvention residual_convention = ResidualConvention::physical;
    // false: every worker sees the exact global mean gradient (results are
    // bit-identical for any worker count). true: each worker steps its own
    // replica on its shard mean and replicas are averaged after each epoch.
    bool local_step = false;

    void validate(std::size_t n_samples) const;
};

// Mean absolute error, the data-driven objective.
double data_loss(std::span<const double> prediction, std::span<const double> truth);

// Periodic 3-point second derivative, (f_{i-1} - 2 f_i + f_{i+1}) / dx^2.
std::vector<double> fd_second_derivative(std::span<const double> f, double dx);

// N_d anchor indices spread over the grid: round(j * n_grid / n_points).
// Distinct and sorted because the spacing is at least one cell.
std::vector<int> sparse_select(int n_points, int n_grid);

// (1/n) sum_i |c * (D2 pred)_i + rho_norm_i|
//   + (lambda / N_d) sum_{j in anchors} |pred_j - phi_norm_j|,
// where c and the stencil dx follow the residual convention. The first
// term drives the prediction toward solving the discrete field equation,
// the second pins the free constants the equation cannot see.
double pinn_loss(std::span<const double> prediction, const TrainSample& sample, double lambda,
                 std::span<const int> anchors, ResidualConvention convention, double dx);

struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    long t = 0;

    explicit AdamState(std::size_t n) : m(n, 0.0), v(n, 0.0) {}
};

// One Adam update with beta1 = 0.9, beta2 = 0.999, eps = 1e-8 and bias
// correction.
void adam_step(std::span<double> params, std::span<const double> grad, AdamState& state, double learning_rate);

// Contiguous shards: floor(n / workers) each, remainder to the last one.
std::vector<std::size_t> shard_sizes(std::size_t n, int workers);

struct TrainResult {
    std::vector<double> params;
    std::vector<double> loss_history;   // mean loss per epoch
    std::vector<double> epoch_wall_ms;  // measured, excluded from hashed artifacts
};

// Full-batch training from init_params(spec, config.seed). Workers split
// the batch only to parallelize gradient evaluation; see local_step above
// for the one mode that changes the math.
TrainResult train(const ModelSpec& spec, const Dataset& data, const TrainConfig& config);
TrainResult train_parallel(const ModelSpec& spec, const Dataset& data, const TrainConfig& config);

// Mean loss of fixed parameters over a dataset (no gradient).
double evaluate_loss(const ModelSpec& spec, std::span<const double> params, const Dataset& data,
                     const TrainConfig& config);

}  // namespace qpic

#endif
