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

#ifndef QPIC_QSIM_HPP
#define QPIC_QSIM_HPP

#include <complex>
#include <span>
#include <string>
#include <vector>

namespace qpic {

// Dense statevector over n qubits. Qubit 0 is the most significant bit of
// the basis index: |q0 q1 ... q_{n-1}> maps to index q0*2^{n-1} + ... .
struct QuantumState {
    std::vector<std::complex<double>> amplitudes;
    int n_qubits = 0;

    static QuantumState zero_state(int n_qubits);

    std::size_t dim() const {
        return amplitudes.size();
    }
    double norm_squared() const;
};

// Single-qubit rotations exp(-i theta P / 2) for P = X, Y, Z.
void apply_rx(QuantumState& state, int qubit, double theta);
void apply_ry(QuantumState& state, int qubit, double theta);
void apply_rz(QuantumState& state, int qubit, double theta);

// General rotation Rot(phi, theta, omega) = RZ(omega) RY(theta) RZ(phi);
// RZ(phi) acts first.
void apply_rot(QuantumState& state, int qubit, double phi, double theta, double omega);

void apply_cnot(QuantumState& state, int control, int target);
void apply_cz(QuantumState& state, int a, int b);

// Normalizes `features` into amplitudes: w = f / ||f||_2. A vector with
// ||f||_2 < 1e-12 embeds as the uniform superposition instead. Length must
// be exactly 2^n_qubits.
QuantumState amplitude_embed(std::span<const double> features, int n_qubits);

enum class AnsatzKind {
    strongly_entangling,
    basic_entangler,
    simplified_two_design,
};

std::string ansatz_name(AnsatzKind kind);
AnsatzKind ansatz_from_name(const std::string& name);

struct AnsatzSpec {
    AnsatzKind kind = AnsatzKind::strongly_entangling;
    int n_qubits = 6;
    int n_layers = 6;

    // strongly_entangling: 3*n*L, basic_entangler: n*L,
    // simplified_two_design: n + 2*(n-1)*L.
    int param_count() const;

    // CNOT offset of strongly-entangling layer l: (l mod (n-1)) + 1.
    int entangling_range(int layer) const;

    bool operator==(const AnsatzSpec&) const = default;
};

// Applies the parameterized circuit in place. params.size() must equal
// spec.param_count().
void apply_ansatz(QuantumState& state, const AnsatzSpec& spec, std::span<const double> params);

// p_i = |a_i|^2.
std::vector<double> probabilities(const QuantumState& state);

// probabilities(ansatz(embed(features))). If final_state is non-null the
// evolved statevector is stored there for later gradient replay.
std::vector<double> quantum_forward(std::span<const double> features, const AnsatzSpec& spec,
                                    std::span<const double> params, QuantumState* final_state = nullptr);

struct QuantumGradient {
    std::vector<double> features;  // d loss / d feature
    std::vector<double> params;    // d loss / d circuit parameter
};

// Reverse-mode gradient of sum_i upstream_i * p_i with respect to features
// and parameters. Walks the circuit backward, un-applying one gate at a
// time, in O(gates * 2^n) total; no extra forward executions. Passing the
// final_state captured by quantum_forward skips the redundant re-run.
QuantumGradient quantum_gradient(std::span<const double> features, const AnsatzSpec& spec,
                                 std::span<const double> params, std::span<const double> upstream,
                                 const QuantumState* final_state = nullptr);

}  // namespace qpic

#endif
