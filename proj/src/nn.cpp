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

#include "qpic/nn.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "qpic/csv.hpp"
#include "qpic/errors.hpp"
#include "qpic/rng.hpp"

namespace qpic {

std::string model_kind_name(ModelKind kind) {
    return kind == ModelKind::cqc ? "cqc" : "ccc";
}

ModelKind model_kind_from_name(const std::string& name) {
    if (name == "cqc") {
        return ModelKind::cqc;
    }
    if (name == "ccc") {
        return ModelKind::ccc;
    }
    throw ConfigError("unknown model kind '" + name + "' (expected cqc or ccc)");
}

int ModelSpec::param_count() const {
    const int dense = width * width + width;  // one linear layer
    if (kind == ModelKind::ccc) {
        return 3 * dense;
    }
    return 2 * dense + ansatz.param_count();
}

void ModelSpec::validate() const {
    if (width < 1) {
        throw ConfigError("model width must be positive");
    }
    if (kind == ModelKind::cqc) {
        if (ansatz.n_qubits < 1 || ansatz.n_layers < 0) {
            throw ConfigError("ansatz needs n_qubits >= 1 and n_layers >= 0");
        }
        if (width != (1 << ansatz.n_qubits)) {
            throw ConfigError("cqc width " + std::to_string(width) + " must equal 2^" +
                              std::to_string(ansatz.n_qubits));
        }
    }
}

std::vector<double> activation(Activation kind, std::span<const double> input) {
    std::vector<double> out(input.size());
    if (kind == Activation::relu) {
        for (std::size_t i = 0; i < input.size(); ++i) {
            out[i] = input[i] > 0.0 ? input[i] : 0.0;
        }
    } else {
        for (std::size_t i = 0; i < input.size(); ++i) {
            out[i] = std::tanh(input[i]);
        }
    }
    return out;
}

void linear_forward(std::span<const double> weights, std::span<const double> bias, std::span<const double> input,
                    std::span<double> out) {
    const std::size_t rows = out.size();
    const std::size_t cols = input.size();
    if (weights.size() != rows * cols || bias.size() != rows) {
        throw ConfigError("linear layer shape mismatch");
    }
    for (std::size_t i = 0; i < rows; ++i) {
        double acc = bias[i];
        const double* w = weights.data() + i * cols;
        for (std::size_t j = 0; j < cols; ++j) {
            acc += w[j] * input[j];
        }
        out[i] = acc;
    }
}

namespace {

// Flat parameter layout. cqc: W1, b1, circuit angles, W2, b2.
// ccc: W1, b1, W2, b2, W3, b3. Wk row-major width x width.
struct Layout {
    std::size_t w_size;
    std::size_t dense;  // w_size + width
    std::size_t quantum;
};

Layout layout_of(const ModelSpec& spec) {
    const std::size_t w = static_cast<std::size_t>(spec.width);
    return {w * w, w * w + w, spec.kind == ModelKind::cqc ? static_cast<std::size_t>(spec.ansatz.param_count()) : 0};
}

template <typename Span>
auto slice(Span s, std::size_t offset, std::size_t count) {
    return s.subspan(offset, count);
}

void check_sizes(const ModelSpec& spec, std::span<const double> params, std::span<const double> input) {
    spec.validate();
    if (static_cast<int>(input.size()) != spec.width) {
        throw ConfigError("model input length " + std::to_string(input.size()) + " does not match width " +
                          std::to_string(spec.width));
    }
    if (params.size() != static_cast<std::size_t>(spec.param_count())) {
        throw ConfigError("parameter vector length " + std::to_string(params.size()) + " does not match model (" +
                          std::to_string(spec.param_count()) + ")");
    }
}

}  // namespace

std::vector<double> init_params(const ModelSpec& spec, std::uint64_t seed) {
    spec.validate();
    std::vector<double> params(spec.param_count(), 0.0);
    std::mt19937_64 rng(seed);
    const double bound = 1.0 / std::sqrt(static_cast<double>(spec.width));
    const Layout lay = layout_of(spec);

    auto fill_weights = [&](std::size_t offset) {
        for (std::size_t i = 0; i < lay.w_size; ++i) {
            params[offset + i] = uniform_in(rng, -bound, bound);
        }
        // The trailing `width` bias entries stay zero.
    };

    if (spec.kind == ModelKind::cqc) {
        fill_weights(0);
        for (std::size_t i = 0; i < lay.quantum; ++i) {
            params[lay.dense + i] = uniform_in(rng, 0.0, 2.0 * std::numbers::pi);
        }
        fill_weights(lay.dense + lay.quantum);
    } else {
        fill_weights(0);
        fill_weights(lay.dense);
        fill_weights(2 * lay.dense);
    }
    return params;
}

std::vector<double> model_forward(const ModelSpec& spec, std::span<const double> params, std::span<const double> input,
                                  ForwardCache* cache) {
    check_sizes(spec, params, input);
    const std::size_t w = static_cast<std::size_t>(spec.width);
    const Layout lay = layout_of(spec);

    std::vector<double> z1(w);
    linear_forward(slice(params, 0, lay.w_size), slice(params, lay.w_size, w), input, z1);
    std::vector<double> h1 = activation(Activation::relu, z1);

    std::vector<double> z_out(w);
    std::vector<double> middle;  // input of the final linear layer
    ForwardCache local;
    ForwardCache& c = cache != nullptr ? *cache : local;

    if (spec.kind == ModelKind::cqc) {
        c.probs = quantum_forward(h1, spec.ansatz, slice(params, lay.dense, lay.quantum), &c.final_state);
        middle = c.probs;
        const std::size_t off = lay.dense + lay.quantum;
        linear_forward(slice(params, off, lay.w_size), slice(params, off + lay.w_size, w), middle, z_out);
    } else {
        std::vector<double> z2(w);
        linear_forward(slice(params, lay.dense, lay.w_size), slice(params, lay.dense + lay.w_size, w), h1, z2);
        std::vector<double> h2 = activation(Activation::relu, z2);
        linear_forward(slice(params, 2 * lay.dense, lay.w_size), slice(params, 2 * lay.dense + lay.w_size, w), h2,
                       z_out);
        middle = h2;
        c.z2 = std::move(z2);
        c.h2 = middle;
    }

    std::vector<double> out = activation(Activation::tanh, z_out);
    if (cache != nullptr) {
        c.input.assign(input.begin(), input.end());
        c.z1 = std::move(z1);
        c.h1 = std::move(h1);
        c.z_out = std::move(z_out);
        c.out = out;
    }
    return out;
}

namespace {

// grad_W += outer(delta, x); grad_b += delta; returns delta W (for the
// previous layer) in `back` if non-null.
void linear_backward(std::span<const double> weights, std::span<const double> x, std::span<const double> delta,
                     std::span<double> grad_w, std::span<double> grad_b, std::vector<double>* back) {
    const std::size_t rows = delta.size();
    const std::size_t cols = x.size();
    for (std::size_t i = 0; i < rows; ++i) {
        const double d = delta[i];
        grad_b[i] += d;
        double* gw = grad_w.data() + i * cols;
        for (std::size_t j = 0; j < cols; ++j) {
            gw[j] += d * x[j];
        }
    }
    if (back != nullptr) {
        back->assign(cols, 0.0);
        for (std::size_t i = 0; i < rows; ++i) {
            const double d = delta[i];
            const double* w = weights.data() + i * cols;
            for (std::size_t j = 0; j < cols; ++j) {
                (*back)[j] += w[j] * d;
            }
        }
    }
}

}  // namespace

void model_backward(const ModelSpec& spec, std::span<const double> params, const ForwardCache& cache,
                    std::span<const double> upstream, std::span<double> grad) {
    check_sizes(spec, params, cache.input);
    if (upstream.size() != cache.out.size() || grad.size() != params.size()) {
        throw ConfigError("backward buffer sizes do not match model");
    }
    const std::size_t w = static_cast<std::size_t>(spec.width);
    const Layout lay = layout_of(spec);

    // tanh output stage.
    std::vector<double> delta(w);
    for (std::size_t i = 0; i < w; ++i) {
        delta[i] = upstream[i] * (1.0 - cache.out[i] * cache.out[i]);
    }

    std::vector<double> d_middle;
    if (spec.kind == ModelKind::cqc) {
        const std::size_t off = lay.dense + lay.quantum;
        linear_backward(slice(params, off, lay.w_size), cache.probs, delta, slice(grad, off, lay.w_size),
                        slice(grad, off + lay.w_size, w), &d_middle);

        const QuantumGradient qgrad = quantum_gradient(cache.h1, spec.ansatz, slice(params, lay.dense, lay.quantum),
                                                       d_middle, &cache.final_state);
        for (std::size_t i = 0; i < lay.quantum; ++i) {
            grad[lay.dense + i] += qgrad.params[i];
        }
        d_middle = qgrad.features;
    } else {
        linear_backward(slice(params, 2 * lay.dense, lay.w_size), cache.h2, delta,
                        slice(grad, 2 * lay.dense, lay.w_size), slice(grad, 2 * lay.dense + lay.w_size, w),
                        &d_middle);
        for (std::size_t i = 0; i < w; ++i) {
            d_middle[i] = cache.z2[i] > 0.0 ? d_middle[i] : 0.0;
        }
        std::vector<double> d_h1;
        linear_backward(slice(params, lay.dense, lay.w_size), cache.h1, d_middle, slice(grad, lay.dense, lay.w_size),
                        slice(grad, lay.dense + lay.w_size, w), &d_h1);
        d_middle = std::move(d_h1);
    }

    // First relu stage; relu'(0) = 0 keeps the subgradient deterministic.
    for (std::size_t i = 0; i < w; ++i) {
        d_middle[i] = cache.z1[i] > 0.0 ? d_middle[i] : 0.0;
    }
    linear_backward(slice(params, 0, lay.w_size), cache.input, d_middle, slice(grad, 0, lay.w_size),
                    slice(grad, lay.w_size, w), nullptr);
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
    checkpoint.spec.validate();
    if (checkpoint.params.size() != static_cast<std::size_t>(checkpoint.spec.param_count())) {
        throw ConfigError("checkpoint parameter count does not match its model spec");
    }
    std::ofstream out(path);
    if (!out) {
        throw ConfigError("cannot open '" + path.string() + "' for writing");
    }
    out << "qpic-checkpoint v1\n";
    out << "kind " << model_kind_name(checkpoint.spec.kind) << '\n';
    out << "width " << checkpoint.spec.width << '\n';
    if (checkpoint.spec.kind == ModelKind::cqc) {
        out << "ansatz " << ansatz_name(checkpoint.spec.ansatz.kind) << '\n';
        out << "qubits " << checkpoint.spec.ansatz.n_qubits << '\n';
        out << "layers " << checkpoint.spec.ansatz.n_layers << '\n';
    }
    out << "seed " << checkpoint.seed << '\n';
    out << "params " << checkpoint.params.size() << '\n';
    for (double p : checkpoint.params) {
        out << format_double(p) << '\n';
    }
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open checkpoint '" + path.string() + "'");
    }
    std::string line;
    if (!std::getline(in, line) || line != "qpic-checkpoint v1") {
        throw ConfigError("'" + path.string() + "' is not a qpic checkpoint");
    }
    Checkpoint ck;
    std::size_t n_params = 0;
    bool have_count = false;
    while (!have_count && std::getline(in, line)) {
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "kind") {
            std::string v;
            ls >> v;
            ck.spec.kind = model_kind_from_name(v);
        } else if (key == "width") {
            ls >> ck.spec.width;
        } else if (key == "ansatz") {
            std::string v;
            ls >> v;
            ck.spec.ansatz.kind = ansatz_from_name(v);
        } else if (key == "qubits") {
            ls >> ck.spec.ansatz.n_qubits;
        } else if (key == "layers") {
            ls >> ck.spec.ansatz.n_layers;
        } else if (key == "seed") {
            ls >> ck.seed;
        } else if (key == "params") {
            ls >> n_params;
            have_count = true;
        } else {
            throw ConfigError("unknown checkpoint field '" + key + "' in " + path.string());
        }
        if (ls.fail()) {
            throw ConfigError("malformed checkpoint line '" + line + "' in " + path.string());
        }
    }
    if (!have_count) {
        throw ConfigError("checkpoint '" + path.string() + "' is missing the params section");
    }
    ck.spec.validate();
    if (n_params != static_cast<std::size_t>(ck.spec.param_count())) {
        throw ConfigError("checkpoint declares " + std::to_string(n_params) + " params, model needs " +
                          std::to_string(ck.spec.param_count()));
    }
    ck.params.reserve(n_params);
    for (std::size_t i = 0; i < n_params; ++i) {
        if (!std::getline(in, line)) {
            throw ConfigError("checkpoint '" + path.string() + "' is truncated");
        }
        char* end = nullptr;
        const double v = std::strtod(line.c_str(), &end);
        if (end == line.c_str()) {
            throw ConfigError("malformed parameter value '" + line + "' in " + path.string());
        }
        ck.params.push_back(v);
    }
    return ck;
}

}  // namespace qpic
