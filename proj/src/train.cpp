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

#include "qpic/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <thread>

#include "qpic/errors.hpp"

namespace qpic {

void TrainConfig::validate(std::size_t n_samples) const {
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
        throw ConfigError("learning_rate must be positive and finite");
    }
    if (epochs < 0) {
        throw ConfigError("epochs must be non-negative");
    }
    if (workers < 1) {
        throw ConfigError("workers must be at least 1");
    }
    if (static_cast<std::size_t>(workers) > n_samples) {
        throw ConfigError("more workers (" + std::to_string(workers) + ") than training samples (" +
                          std::to_string(n_samples) + ")");
    }
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw ConfigError("lambda must be non-negative and finite");
    }
    if (n_data_points < 1) {
        throw ConfigError("n_data_points must be at least 1");
    }
}

double data_loss(std::span<const double> prediction, std::span<const double> truth) {
    if (prediction.size() != truth.size() || prediction.empty()) {
        throw ConfigError("data_loss needs two equal-length non-empty vectors");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < prediction.size(); ++i) {
        sum += std::abs(prediction[i] - truth[i]);
    }
    return sum / static_cast<double>(prediction.size());
}

std::vector<double> fd_second_derivative(std::span<const double> f, double dx) {
    const std::size_t n = f.size();
    if (n < 3) {
        throw ConfigError("second derivative needs at least 3 grid points");
    }
    const double inv_dx2 = 1.0 / (dx * dx);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t prev = i == 0 ? n - 1 : i - 1;
        const std::size_t next = i + 1 == n ? 0 : i + 1;
        out[i] = (f[prev] - 2.0 * f[i] + f[next]) * inv_dx2;
    }
    return out;
}

std::vector<int> sparse_select(int n_points, int n_grid) {
    if (n_points < 1 || n_points > n_grid) {
        throw ConfigError("anchor count must be in [1, n_grid]");
    }
    std::vector<int> idx(n_points);
    for (int j = 0; j < n_points; ++j) {
        idx[j] = static_cast<int>(std::llround(static_cast<double>(j) * n_grid / n_points));
    }
    return idx;
}

double pinn_loss(std::span<const double> prediction, const TrainSample& sample, double lambda,
                 std::span<const int> anchors, ResidualConvention convention, double dx) {
    const std::size_t n = prediction.size();
    if (sample.rho_norm.size() != n || sample.phi_norm.size() != n) {
        throw ConfigError("pinn_loss sample grid size mismatch");
    }
    if (anchors.empty() && lambda > 0.0) {
        throw ConfigError("pinn_loss needs data anchors when lambda > 0");
    }
    const bool physical = convention == ResidualConvention::physical;
    const double c = physical ? sample.s_phi / sample.s_rho : 1.0;
    const double d = physical ? dx : 1.0;

    const std::vector<double> d2 = fd_second_derivative(prediction, d);
    double physics = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        physics += std::abs(c * d2[i] + sample.rho_norm[i]);
    }
    physics /= static_cast<double>(n);

    double anchored = 0.0;
    if (!anchors.empty()) {
        for (int j : anchors) {
            anchored += std::abs(prediction[j] - sample.phi_norm[j]);
        }
        anchored *= lambda / static_cast<double>(anchors.size());
    }
    return physics + anchored;
}

void adam_step(std::span<double> params, std::span<const double> grad, AdamState& state, double learning_rate) {
    if (params.size() != grad.size() || state.m.size() != params.size()) {
        throw ConfigError("adam_step buffer sizes disagree");
    }
    constexpr double beta1 = 0.9;
    constexpr double beta2 = 0.999;
    constexpr double eps = 1e-8;
    state.t += 1;
    const double corr1 = 1.0 - std::pow(beta1, static_cast<double>(state.t));
    const double corr2 = 1.0 - std::pow(beta2, static_cast<double>(state.t));
    for (std::size_t i = 0; i < params.size(); ++i) {
        state.m[i] = beta1 * state.m[i] + (1.0 - beta1) * grad[i];
        state.v[i] = beta2 * state.v[i] + (1.0 - beta2) * grad[i] * grad[i];
        const double m_hat = state.m[i] / corr1;
        const double v_hat = state.v[i] / corr2;
        params[i] -= learning_rate * m_hat / (std::sqrt(v_hat) + eps);
    }
}

std::vector<std::size_t> shard_sizes(std::size_t n, int workers) {
    if (workers < 1 || static_cast<std::size_t>(workers) > n) {
        throw ConfigError("worker count must be in [1, n]");
    }
    std::vector<std::size_t> sizes(workers, n / workers);
    sizes.back() += n % workers;
    return sizes;
}

namespace {

// Loss and gradient of one sample; grad_row is zeroed and filled.
double eval_sample(const ModelSpec& spec, std::span<const double> params, const TrainSample& sample,
                   const TrainConfig& config, double dx, std::span<const int> anchors, std::span<double> grad_row) {
    std::fill(grad_row.begin(), grad_row.end(), 0.0);
    ForwardCache cache;
    const std::vector<double> pred = model_forward(spec, params, sample.rho_norm, &cache);
    const std::size_t n = pred.size();
    std::vector<double> upstream(n, 0.0);
    double loss = 0.0;

    if (config.loss == LossKind::data) {
        const double inv = 1.0 / static_cast<double>(anchors.size());
        for (int j : anchors) {
            const double diff = pred[j] - sample.phi_norm[j];
            loss += std::abs(diff);
            upstream[j] = (diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0)) * inv;
        }
        loss *= inv;
    } else {
        loss = pinn_loss(pred, sample, config.lambda, anchors, config.residual_convention, dx);
        const bool physical = config.residual_convention == ResidualConvention::physical;
        const double c = physical ? sample.s_phi / sample.s_rho : 1.0;
        const double d = physical ? dx : 1.0;
        const std::vector<double> d2 = fd_second_derivative(pred, d);
        std::vector<double> sign(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double r = c * d2[i] + sample.rho_norm[i];
            sign[i] = r > 0.0 ? 1.0 : (r < 0.0 ? -1.0 : 0.0);
        }
        // The stencil is symmetric, so the adjoint of D2 is D2 itself.
        const std::vector<double> back = fd_second_derivative(sign, d);
        const double scale = c / static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) {
            upstream[i] = scale * back[i];
        }
        const double anchor_scale = config.lambda / static_cast<double>(anchors.size());
        for (int j : anchors) {
            const double diff = pred[j] - sample.phi_norm[j];
            upstream[j] += anchor_scale * (diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0));
        }
    }

    model_backward(spec, params, cache, upstream, grad_row);
    return loss;
}

struct Shards {
    std::vector<std::size_t> begin;  // workers + 1 entries
};

Shards make_shards(std::size_t n, int workers) {
    const std::vector<std::size_t> sizes = shard_sizes(n, workers);
    Shards s;
    s.begin.assign(1, 0);
    for (std::size_t size : sizes) {
        s.begin.push_back(s.begin.back() + size);
    }
    return s;
}

void check_dataset(const ModelSpec& spec, const Dataset& data) {
    for (const TrainSample& s : data.samples) {
        if (static_cast<int>(s.rho_norm.size()) != spec.width || static_cast<int>(s.phi_norm.size()) != spec.width) {
            throw ConfigError("dataset grid size does not match model width");
        }
    }
}

// Anchors of the data term. The pinn loss uses exactly N_d of them; the
// data loss treats any N_d at or above the grid width as "every point",
// so the default dense configuration works for any grid size.
std::vector<int> loss_anchors(const ModelSpec& spec, const TrainConfig& config) {
    const int n = config.loss == LossKind::data ? std::min(config.n_data_points, spec.width) : config.n_data_points;
    return sparse_select(n, spec.width);
}

TrainResult train_exact(const ModelSpec& spec, const Dataset& data, const TrainConfig& config) {
    const std::size_t n = data.samples.size();
    const std::size_t n_params = static_cast<std::size_t>(spec.param_count());
    std::vector<double> params = init_params(spec, config.seed);
    AdamState adam(n_params);
    const std::vector<int> anchors = loss_anchors(spec, config);

    // Per-sample gradient rows are reduced in sample order afterwards, so
    // the result is bit-identical no matter how many workers ran.
    std::vector<double> grad_rows(n * n_params);
    std::vector<double> losses(n);
    std::vector<double> grad(n_params);
    const Shards shards = make_shards(n, config.workers);

    TrainResult result;
    result.loss_history.reserve(config.epochs);
    result.epoch_wall_ms.reserve(config.epochs);

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        const auto t0 = std::chrono::steady_clock::now();

        auto run_shard = [&](int w) {
            for (std::size_t i = shards.begin[w]; i < shards.begin[w + 1]; ++i) {
                losses[i] = eval_sample(spec, params, data.samples[i], config, data.grid_dx, anchors,
                                        std::span<double>(grad_rows.data() + i * n_params, n_params));
            }
        };
        if (config.workers == 1) {
            run_shard(0);
        } else {
            std::vector<std::thread> pool;
            pool.reserve(config.workers);
            for (int w = 0; w < config.workers; ++w) {
                pool.emplace_back(run_shard, w);
            }
            for (std::thread& t : pool) {
                t.join();
            }
        }

        std::fill(grad.begin(), grad.end(), 0.0);
        double loss_sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double* row = grad_rows.data() + i * n_params;
            for (std::size_t p = 0; p < n_params; ++p) {
                grad[p] += row[p];
            }
            loss_sum += losses[i];
        }
        const double inv_n = 1.0 / static_cast<double>(n);
        for (double& g : grad) {
            g *= inv_n;
        }
        const double loss_mean = loss_sum * inv_n;
        if (!std::isfinite(loss_mean)) {
            throw NumericError("non-finite loss at epoch " + std::to_string(epoch) + "; aborting training");
        }
        adam_step(params, grad, adam, config.learning_rate);

        result.loss_history.push_back(loss_mean);
        const auto t1 = std::chrono::steady_clock::now();
        result.epoch_wall_ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
    }

    result.params = std::move(params);
    return result;
}

TrainResult train_local_step(const ModelSpec& spec, const Dataset& data, const TrainConfig& config) {
    const std::size_t n = data.samples.size();
    const std::size_t n_params = static_cast<std::size_t>(spec.param_count());
    std::vector<double> params = init_params(spec, config.seed);
    const std::vector<int> anchors = loss_anchors(spec, config);
    const int workers = config.workers;
    const Shards shards = make_shards(n, workers);

    std::vector<std::vector<double>> replicas(workers, params);
    std::vector<AdamState> adams(workers, AdamState(n_params));
    std::vector<std::vector<double>> grads(workers, std::vector<double>(n_params));
    std::vector<double> losses(n);

    TrainResult result;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        const auto t0 = std::chrono::steady_clock::now();

        auto run_shard = [&](int w) {
            std::vector<double> local_row(n_params);
            std::fill(grads[w].begin(), grads[w].end(), 0.0);
            for (std::size_t i = shards.begin[w]; i < shards.begin[w + 1]; ++i) {
                losses[i] = eval_sample(spec, replicas[w], data.samples[i], config, data.grid_dx, anchors, local_row);
                for (std::size_t p = 0; p < n_params; ++p) {
                    grads[w][p] += local_row[p];
                }
            }
            const double inv = 1.0 / static_cast<double>(shards.begin[w + 1] - shards.begin[w]);
            for (double& g : grads[w]) {
                g *= inv;
            }
            adam_step(replicas[w], grads[w], adams[w], config.learning_rate);
        };
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back(run_shard, w);
        }
        for (std::thread& t : pool) {
            t.join();
        }

        // Average replicas in worker order, then resynchronize them.
        std::fill(params.begin(), params.end(), 0.0);
        for (int w = 0; w < workers; ++w) {
            for (std::size_t p = 0; p < n_params; ++p) {
                params[p] += replicas[w][p];
            }
        }
        for (double& p : params) {
            p /= static_cast<double>(workers);
        }
        for (int w = 0; w < workers; ++w) {
            replicas[w] = params;
        }

        double loss_sum = 0.0;
        for (double l : losses) {
            loss_sum += l;
        }
        const double loss_mean = loss_sum / static_cast<double>(n);
        if (!std::isfinite(loss_mean)) {
            throw NumericError("non-finite loss at epoch " + std::to_string(epoch) + "; aborting training");
        }
        result.loss_history.push_back(loss_mean);
        const auto t1 = std::chrono::steady_clock::now();
        result.epoch_wall_ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
    }

    result.params = std::move(params);
    return result;
}

}  // namespace

TrainResult train_parallel(const ModelSpec& spec, const Dataset& data, const TrainConfig& config) {
    spec.validate();
    config.validate(data.samples.size());
    check_dataset(spec, data);
    if (config.loss == LossKind::pinn && config.n_data_points > spec.width) {
        throw ConfigError("n_data_points cannot exceed the grid size");
    }
    if (config.local_step && config.workers > 1) {
        return train_local_step(spec, data, config);
    }
    return train_exact(spec, data, config);
}

TrainResult train(const ModelSpec& spec, const Dataset& data, const TrainConfig& config) {
    TrainConfig serial = config;
    serial.workers = 1;
    return train_parallel(spec, data, serial);
}

double evaluate_loss(const ModelSpec& spec, std::span<const double> params, const Dataset& data,
                     const TrainConfig& config) {
    spec.validate();
    check_dataset(spec, data);
    if (data.samples.empty()) {
        throw ConfigError("cannot evaluate on an empty dataset");
    }
    const std::vector<int> anchors = loss_anchors(spec, config);
    double sum = 0.0;
    for (const TrainSample& sample : data.samples) {
        const std::vector<double> pred = model_forward(spec, params, sample.rho_norm, nullptr);
        if (config.loss == LossKind::data) {
            double mae = 0.0;
            for (int j : anchors) {
                mae += std::abs(pred[j] - sample.phi_norm[j]);
            }
            sum += mae / static_cast<double>(anchors.size());
        } else {
            sum += pinn_loss(pred, sample, config.lambda, anchors, config.residual_convention, data.grid_dx);
        }
    }
    return sum / static_cast<double>(data.samples.size());
}

}  // namespace qpic
