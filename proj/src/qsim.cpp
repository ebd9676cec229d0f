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

#include "qpic/qsim.hpp"

#include <cmath>
#include <stdexcept>

namespace qpic {

namespace {

using cplx = std::complex<double>;

void check_qubit(const QuantumState& state, int qubit) {
    if (qubit < 0 || qubit >= state.n_qubits) {
        throw std::invalid_argument("qubit index " + std::to_string(qubit) + " out of range for " +
                                    std::to_string(state.n_qubits) + " qubits");
    }
}

// Bit position of a qubit inside the basis index (qubit 0 is the MSB).
inline int bit_of(const QuantumState& state, int qubit) {
    return state.n_qubits - 1 - qubit;
}

// Applies the 2x2 matrix [[m00, m01], [m10, m11]] on `qubit`. Pairs are
// (i, i + stride) where bit `b` of i is 0.
void apply_single_qubit(QuantumState& state, int qubit, cplx m00, cplx m01, cplx m10, cplx m11) {
    check_qubit(state, qubit);
    const std::size_t stride = std::size_t{1} << bit_of(state, qubit);
    const std::size_t dim = state.dim();
    for (std::size_t base = 0; base < dim; base += 2 * stride) {
        for (std::size_t i = base; i < base + stride; ++i) {
            const cplx a = state.amplitudes[i];
            const cplx b = state.amplitudes[i + stride];
            state.amplitudes[i] = m00 * a + m01 * b;
            state.amplitudes[i + stride] = m10 * a + m11 * b;
        }
    }
}

}  // namespace

QuantumState QuantumState::zero_state(int n_qubits) {
    if (n_qubits < 1 || n_qubits > 30) {
        throw std::invalid_argument("n_qubits must be in [1, 30]");
    }
    QuantumState s;
    s.n_qubits = n_qubits;
    s.amplitudes.assign(std::size_t{1} << n_qubits, cplx(0.0, 0.0));
    s.amplitudes[0] = cplx(1.0, 0.0);
    return s;
}

double QuantumState::norm_squared() const {
    double sum = 0.0;
    for (const cplx& a : amplitudes) {
        sum += std::norm(a);
    }
    return sum;
}

void apply_rx(QuantumState& state, int qubit, double theta) {
    const double c = std::cos(0.5 * theta);
    const double s = std::sin(0.5 * theta);
    apply_single_qubit(state, qubit, cplx(c, 0.0), cplx(0.0, -s), cplx(0.0, -s), cplx(c, 0.0));
}

void apply_ry(QuantumState& state, int qubit, double theta) {
    const double c = std::cos(0.5 * theta);
    const double s = std::sin(0.5 * theta);
    apply_single_qubit(state, qubit, cplx(c, 0.0), cplx(-s, 0.0), cplx(s, 0.0), cplx(c, 0.0));
}

void apply_rz(QuantumState& state, int qubit, double theta) {
    const double c = std::cos(0.5 * theta);
    const double s = std::sin(0.5 * theta);
    apply_single_qubit(state, qubit, cplx(c, -s), cplx(0.0, 0.0), cplx(0.0, 0.0), cplx(c, s));
}

void apply_rot(QuantumState& state, int qubit, double phi, double theta, double omega) {
    apply_rz(state, qubit, phi);
    apply_ry(state, qubit, theta);
    apply_rz(state, qubit, omega);
}

void apply_cnot(QuantumState& state, int control, int target) {
    check_qubit(state, control);
    check_qubit(state, target);
    if (control == target) {
        throw std::invalid_argument("cnot control and target must differ");
    }
    const int bc = bit_of(state, control);
    const int bt = bit_of(state, target);
    const std::size_t tmask = std::size_t{1} << bt;
    const std::size_t dim = state.dim();
    for (std::size_t i = 0; i < dim; ++i) {
        if (((i >> bc) & 1) == 1 && ((i >> bt) & 1) == 0) {
            std::swap(state.amplitudes[i], state.amplitudes[i | tmask]);
        }
    }
}

void apply_cz(QuantumState& state, int a, int b) {
    check_qubit(state, a);
    check_qubit(state, b);
    if (a == b) {
        throw std::invalid_argument("cz qubits must differ");
    }
    const int ba = bit_of(state, a);
    const int bb = bit_of(state, b);
    const std::size_t dim = state.dim();
    for (std::size_t i = 0; i < dim; ++i) {
        if (((i >> ba) & 1) == 1 && ((i >> bb) & 1) == 1) {
            state.amplitudes[i] = -state.amplitudes[i];
        }
    }
}

QuantumState amplitude_embed(std::span<const double> features, int n_qubits) {
    QuantumState state = QuantumState::zero_state(n_qubits);
    if (features.size() != state.dim()) {
        throw std::invalid_argument("feature length " + std::to_string(features.size()) + " does not match 2^" +
                                    std::to_string(n_qubits));
    }
    double norm_sq = 0.0;
    for (double f : features) {
        norm_sq += f * f;
    }
    const double norm = std::sqrt(norm_sq);
    if (norm < 1e-12) {
        // All-zero input carries no direction; fall back to the uniform
        // superposition rather than dividing by (near) zero.
        const double amp = 1.0 / std::sqrt(static_cast<double>(state.dim()));
        for (std::size_t i = 0; i < state.dim(); ++i) {
            state.amplitudes[i] = cplx(amp, 0.0);
        }
        return state;
    }
    for (std::size_t i = 0; i < state.dim(); ++i) {
        state.amplitudes[i] = cplx(features[i] / norm, 0.0);
    }
    return state;
}

std::string ansatz_name(AnsatzKind kind) {
    switch (kind) {
        case AnsatzKind::strongly_entangling:
            return "strongly_entangling";
        case AnsatzKind::basic_entangler:
            return "basic_entangler";
        case AnsatzKind::simplified_two_design:
            return "simplified_two_design";
    }
    throw std::invalid_argument("unknown ansatz kind");
}

AnsatzKind ansatz_from_name(const std::string& name) {
    if (name == "strongly_entangling") {
        return AnsatzKind::strongly_entangling;
    }
    if (name == "basic_entangler") {
        return AnsatzKind::basic_entangler;
    }
    if (name == "simplified_two_design") {
        return AnsatzKind::simplified_two_design;
    }
    throw std::invalid_argument("unknown ansatz '" + name + "'");
}

int AnsatzSpec::param_count() const {
    switch (kind) {
        case AnsatzKind::strongly_entangling:
            return 3 * n_qubits * n_layers;
        case AnsatzKind::basic_entangler:
            return n_qubits * n_layers;
        case AnsatzKind::simplified_two_design:
            return n_qubits + 2 * (n_qubits - 1) * n_layers;
    }
    throw std::invalid_argument("unknown ansatz kind");
}

int AnsatzSpec::entangling_range(int layer) const {
    if (n_qubits < 2) {
        return 0;
    }
    return (layer % (n_qubits - 1)) + 1;
}

namespace {

enum class OpKind { rx, ry, rz, cnot, cz };

struct CircuitOp {
    OpKind kind;
    int q0;          // rotation target, cnot control, first cz qubit
    int q1 = -1;     // cnot target, second cz qubit
    int param = -1;  // index into the flat parameter vector
};

std::vector<CircuitOp> build_ops(const AnsatzSpec& spec) {
    const int n = spec.n_qubits;
    std::vector<CircuitOp> ops;

    switch (spec.kind) {
        case AnsatzKind::strongly_entangling:
            for (int l = 0; l < spec.n_layers; ++l) {
                for (int q = 0; q < n; ++q) {
                    const int base = 3 * (l * n + q);
                    // Rot(phi, theta, omega) = RZ(omega) RY(theta) RZ(phi).
                    ops.push_back({OpKind::rz, q, -1, base + 0});
                    ops.push_back({OpKind::ry, q, -1, base + 1});
                    ops.push_back({OpKind::rz, q, -1, base + 2});
                }
                if (n > 1) {
                    const int range = spec.entangling_range(l);
                    for (int q = 0; q < n; ++q) {
                        ops.push_back({OpKind::cnot, q, (q + range) % n, -1});
                    }
                }
            }
            break;

        case AnsatzKind::basic_entangler:
            for (int l = 0; l < spec.n_layers; ++l) {
                for (int q = 0; q < n; ++q) {
                    ops.push_back({OpKind::rx, q, -1, l * n + q});
                }
                if (n == 2) {
                    // A full ring would apply CNOT(0,1) twice; keep one.
                    ops.push_back({OpKind::cnot, 0, 1, -1});
                } else if (n > 2) {
                    for (int q = 0; q < n; ++q) {
                        ops.push_back({OpKind::cnot, q, (q + 1) % n, -1});
                    }
                }
            }
            break;

        case AnsatzKind::simplified_two_design:
            for (int q = 0; q < n; ++q) {
                ops.push_back({OpKind::ry, q, -1, q});
            }
            for (int l = 0; l < spec.n_layers; ++l) {
                int p = n + l * 2 * (n - 1);
                // Even-pair blocks (0,1), (2,3), ... then odd (1,2), (3,4), ...
                for (int start : {0, 1}) {
                    for (int a = start; a + 1 < n; a += 2) {
                        ops.push_back({OpKind::cz, a, a + 1, -1});
                        ops.push_back({OpKind::ry, a, -1, p++});
                        ops.push_back({OpKind::ry, a + 1, -1, p++});
                    }
                }
            }
            break;
    }
    return ops;
}

void apply_op(QuantumState& state, const CircuitOp& op, double theta) {
    switch (op.kind) {
        case OpKind::rx:
            apply_rx(state, op.q0, theta);
            break;
        case OpKind::ry:
            apply_ry(state, op.q0, theta);
            break;
        case OpKind::rz:
            apply_rz(state, op.q0, theta);
            break;
        case OpKind::cnot:
            apply_cnot(state, op.q0, op.q1);
            break;
        case OpKind::cz:
            apply_cz(state, op.q0, op.q1);
            break;
    }
}

// Im <mu | P | psi> for the rotation generator P (X, Y or Z on one qubit).
// When (mu, psi) sit just after the gate exp(-i theta P / 2) this equals
// the derivative of the readout functional with respect to theta.
double generator_overlap(const QuantumState& mu, const QuantumState& psi, const CircuitOp& op) {
    const std::size_t stride = std::size_t{1} << (psi.n_qubits - 1 - op.q0);
    const std::size_t dim = psi.dim();
    double acc = 0.0;
    if (op.kind == OpKind::rz) {
        for (std::size_t i = 0; i < dim; ++i) {
            const double sign = ((i >> (psi.n_qubits - 1 - op.q0)) & 1) ? -1.0 : 1.0;
            const cplx& m = mu.amplitudes[i];
            const cplx& p = psi.amplitudes[i];
            acc += sign * (m.real() * p.imag() - m.imag() * p.real());
        }
        return acc;
    }
    for (std::size_t base = 0; base < dim; base += 2 * stride) {
        for (std::size_t i = base; i < base + stride; ++i) {
            const cplx& m0 = mu.amplitudes[i];
            const cplx& m1 = mu.amplitudes[i + stride];
            const cplx& p0 = psi.amplitudes[i];
            const cplx& p1 = psi.amplitudes[i + stride];
            if (op.kind == OpKind::ry) {
                // Y psi: (-i p1, i p0)
                acc += -(m0.real() * p1.real() + m0.imag() * p1.imag()) +
                       (m1.real() * p0.real() + m1.imag() * p0.imag());
            } else {
                // X psi: (p1, p0)
                acc += (m0.real() * p1.imag() - m0.imag() * p1.real()) +
                       (m1.real() * p0.imag() - m1.imag() * p0.real());
            }
        }
    }
    return acc;
}

}  // namespace

void apply_ansatz(QuantumState& state, const AnsatzSpec& spec, std::span<const double> params) {
    if (state.n_qubits != spec.n_qubits) {
        throw std::invalid_argument("state qubit count does not match ansatz");
    }
    if (static_cast<int>(params.size()) != spec.param_count()) {
        throw std::invalid_argument("expected " + std::to_string(spec.param_count()) + " parameters, got " +
                                    std::to_string(params.size()));
    }
    for (const CircuitOp& op : build_ops(spec)) {
        apply_op(state, op, op.param >= 0 ? params[op.param] : 0.0);
    }
}

std::vector<double> probabilities(const QuantumState& state) {
    std::vector<double> p(state.dim());
    for (std::size_t i = 0; i < state.dim(); ++i) {
        p[i] = std::norm(state.amplitudes[i]);
    }
    return p;
}

std::vector<double> quantum_forward(std::span<const double> features, const AnsatzSpec& spec,
                                    std::span<const double> params, QuantumState* final_state) {
    QuantumState state = amplitude_embed(features, spec.n_qubits);
    apply_ansatz(state, spec, params);
    std::vector<double> p = probabilities(state);
    if (final_state != nullptr) {
        *final_state = std::move(state);
    }
    return p;
}

QuantumGradient quantum_gradient(std::span<const double> features, const AnsatzSpec& spec,
                                 std::span<const double> params, std::span<const double> upstream,
                                 const QuantumState* final_state) {
    QuantumState psi;
    if (final_state != nullptr) {
        psi = *final_state;
    } else {
        quantum_forward(features, spec, params, &psi);
    }
    if (upstream.size() != psi.dim()) {
        throw std::invalid_argument("upstream length does not match state dimension");
    }

    // Adjoint of the readout p_i = |psi_i|^2: mu_i = upstream_i * psi_i.
    QuantumState mu;
    mu.n_qubits = psi.n_qubits;
    mu.amplitudes.resize(psi.dim());
    for (std::size_t i = 0; i < psi.dim(); ++i) {
        mu.amplitudes[i] = upstream[i] * psi.amplitudes[i];
    }

    QuantumGradient grad;
    grad.params.assign(params.size(), 0.0);
    grad.features.assign(features.size(), 0.0);

    // Walk the circuit backward. At each parameterized gate the pair
    // (mu, psi) sits just after the gate; the overlap with its generator
    // yields the parameter derivative, then both vectors are pulled back
    // through the inverse gate. Self-inverse gates need no sign flip.
    const std::vector<CircuitOp> ops = build_ops(spec);
    for (auto it = ops.rbegin(); it != ops.rend(); ++it) {
        const CircuitOp& op = *it;
        if (op.param >= 0) {
            grad.params[op.param] = generator_overlap(mu, psi, op);
            apply_op(psi, op, -params[op.param]);
            apply_op(mu, op, -params[op.param]);
        } else {
            apply_op(psi, op, 0.0);
            apply_op(mu, op, 0.0);
        }
    }

    // Embedding backward: psi is now the embedded vector w = f / ||f||.
    // d/df of sum_i u_i p_i goes through w via the Jacobian (I - w w^T)/s.
    double norm_sq = 0.0;
    for (double f : features) {
        norm_sq += f * f;
    }
    const double norm = std::sqrt(norm_sq);
    if (norm < 1e-12) {
        return grad;  // uniform fallback is constant in the features
    }
    std::vector<double> g(features.size());
    double w_dot_g = 0.0;
    for (std::size_t i = 0; i < features.size(); ++i) {
        g[i] = 2.0 * mu.amplitudes[i].real();
        w_dot_g += (features[i] / norm) * g[i];
    }
    for (std::size_t i = 0; i < features.size(); ++i) {
        grad.features[i] = (g[i] - (features[i] / norm) * w_dot_g) / norm;
    }
    return grad;
}

}  // namespace qpic
