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

#ifndef QPIC_NN_HPP
#define QPIC_NN_HPP

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "qpic/qsim.hpp"

namespace qpic {

enum class ModelKind {
    cqc,  // classical-quantum-classical sandwich
    ccc,  // all-classical reference of matching layout
};

std::string model_kind_name(ModelKind kind);
ModelKind model_kind_from_name(const std::string& name);

// Both models map a length-`width` grid vector to another one.
//   cqc: linear -> relu -> amplitude embed -> ansatz -> probabilities
//        -> linear -> tanh
//   ccc: linear -> relu -> linear -> relu -> linear -> tanh
// The cqc middle stage requires width == 2^(ansatz.n_qubits).
struct ModelSpec {
    ModelKind kind = ModelKind::cqc;
    int width = 64;
    AnsatzSpec ansatz{};  // ignored for ccc

    int param_count() const;
    void validate() const;  // throws ConfigError

    bool operator==(const ModelSpec&) const = default;
};

enum class Activation { relu, tanh };

// relu uses the convention relu'(0) = 0.
std::vector<double> activation(Activation kind, std::span<const double> input);

// out_i = bias_i + sum_j weights[i * in + j] * input_j (row-major).
void linear_forward(std::span<const double> weights, std::span<const double> bias, std::span<const double> input,
                    std::span<double> out);

// Weights ~ U(-1/sqrt(width), 1/sqrt(width)), biases 0, circuit angles
// ~ U(0, 2 pi); a fixed draw order makes the result a pure function of
// (spec, seed).
std::vector<double> init_params(const ModelSpec& spec, std::uint64_t seed);

// Intermediate values captured by model_forward for the backward pass.
struct ForwardCache {
    std::vector<double> input;
    std::vector<double> z1, h1;
    std::vector<double> z2, h2;  // ccc only
    std::vector<double> probs;   // cqc only
    QuantumState final_state;    // cqc only
    std::vector<double> z_out, out;
};

std::vector<double> model_forward(const ModelSpec& spec, std::span<const double> params, std::span<const double> input,
                                  ForwardCache* cache = nullptr);

// Accumulates d(sum_i upstream_i * out_i)/d params into grad (same layout
// and length as params). cache must come from model_forward on the same
// (spec, params, input).
void model_backward(const ModelSpec& spec, std::span<const double> params, const ForwardCache& cache,
                    std::span<const double> upstream, std::span<double> grad);

struct Checkpoint {
    ModelSpec spec;
    std::uint64_t seed = 0;
    std::vector<double> params;
};

// Plain-text format with %.17g values: round-trips bit-exactly.
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace qpic

#endif
