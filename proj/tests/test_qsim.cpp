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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "qpic/qsim.hpp"
#include "qpic/rng.hpp"

using namespace qpic;

namespace {

// Readout functional the gradients are tested against.
double readout(std::span<const double> features, const AnsatzSpec& spec, std::span<const double> params,
               std::span<const double> upstream) {
    const std::vector<double> p = quantum_forward(features, spec, params);
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        s += upstream[i] * p[i];
    }
    return s;
}

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
    std::vector<double> v(n);
    for (double& x : v) {
        x = uniform_in(rng, lo, hi);
    }
    return v;
}

}  // namespace

TEST_CASE("zero_state starts in |0...0>") {
    const QuantumState s = QuantumState::zero_state(3);
    REQUIRE(s.dim() == 8);
    CHECK(s.amplitudes[0] == std::complex<double>(1.0, 0.0));
    for (std::size_t i = 1; i < 8; ++i) {
        CHECK(std::abs(s.amplitudes[i]) == 0.0);
    }
    CHECK(s.norm_squared() == doctest::Approx(1.0));
}

TEST_CASE("single-qubit rotations match their matrices") {
    const double theta = 0.7;
    const double c = std::cos(theta / 2.0);
    const double s = std::sin(theta / 2.0);

    SUBCASE("ry on |0>") {
        QuantumState q = QuantumState::zero_state(1);
        apply_ry(q, 0, theta);
        CHECK(q.amplitudes[0].real() == doctest::Approx(c));
        CHECK(q.amplitudes[1].real() == doctest::Approx(s));
        CHECK(q.amplitudes[0].imag() == doctest::Approx(0.0));
    }
    SUBCASE("rx on |0>") {
        QuantumState q = QuantumState::zero_state(1);
        apply_rx(q, 0, theta);
        CHECK(q.amplitudes[0].real() == doctest::Approx(c));
        CHECK(q.amplitudes[1].imag() == doctest::Approx(-s));
    }
    SUBCASE("rz phases a superposition") {
        QuantumState q = QuantumState::zero_state(1);
        apply_ry(q, 0, std::numbers::pi / 2.0);  // (|0> + |1>)/sqrt(2)
        apply_rz(q, 0, theta);
        CHECK(q.amplitudes[0].real() == doctest::Approx(std::cos(theta / 2.0) / std::sqrt(2.0)));
        CHECK(q.amplitudes[0].imag() == doctest::Approx(-std::sin(theta / 2.0) / std::sqrt(2.0)));
        CHECK(q.amplitudes[1].imag() == doctest::Approx(std::sin(theta / 2.0) / std::sqrt(2.0)));
    }
}

TEST_CASE("rot applies RZ(phi) first and RZ(omega) last") {
    std::mt19937_64 rng(7);
    QuantumState a = QuantumState::zero_state(2);
    apply_ry(a, 0, 0.4);
    apply_ry(a, 1, -0.9);
    QuantumState b = a;

    apply_rot(a, 1, 0.3, 1.1, -0.5);
    apply_rz(b, 1, 0.3);
    apply_ry(b, 1, 1.1);
    apply_rz(b, 1, -0.5);
    for (std::size_t i = 0; i < a.dim(); ++i) {
        CHECK(std::abs(a.amplitudes[i] - b.amplitudes[i]) < 1e-15);
    }
}

TEST_CASE("qubit 0 is the most significant bit") {
    // RY on qubit 0 of |00> populates index 2 (= |10>), not index 1.
    QuantumState q = QuantumState::zero_state(2);
    apply_ry(q, 0, std::numbers::pi / 2.0);
    CHECK(std::abs(q.amplitudes[2]) == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(std::abs(q.amplitudes[1]) == doctest::Approx(0.0));

    // CNOT with control qubit 0 maps |10> to |11>.
    QuantumState r = QuantumState::zero_state(2);
    r.amplitudes[0] = 0.0;
    r.amplitudes[2] = 1.0;
    apply_cnot(r, 0, 1);
    CHECK(std::abs(r.amplitudes[3]) == doctest::Approx(1.0));
    CHECK(std::abs(r.amplitudes[2]) == doctest::Approx(0.0));

    // Control 0 leaves |01> alone.
    QuantumState t = QuantumState::zero_state(2);
    t.amplitudes[0] = 0.0;
    t.amplitudes[1] = 1.0;
    apply_cnot(t, 0, 1);
    CHECK(std::abs(t.amplitudes[1]) == doctest::Approx(1.0));
}

TEST_CASE("cz flips the sign of |11> only and is symmetric") {
    QuantumState q = QuantumState::zero_state(2);
    q.amplitudes = {{0.5, 0.0}, {0.5, 0.0}, {0.5, 0.0}, {0.5, 0.0}};
    QuantumState r = q;
    apply_cz(q, 0, 1);
    apply_cz(r, 1, 0);
    CHECK(q.amplitudes[0].real() == doctest::Approx(0.5));
    CHECK(q.amplitudes[1].real() == doctest::Approx(0.5));
    CHECK(q.amplitudes[2].real() == doctest::Approx(0.5));
    CHECK(q.amplitudes[3].real() == doctest::Approx(-0.5));
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(q.amplitudes[i] == r.amplitudes[i]);
    }
}

TEST_CASE("gate index validation") {
    QuantumState q = QuantumState::zero_state(2);
    CHECK_THROWS_AS(apply_ry(q, 2, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(apply_ry(q, -1, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(apply_cnot(q, 0, 0), std::invalid_argument);
    CHECK_THROWS_AS(apply_cz(q, 1, 1), std::invalid_argument);
}

TEST_CASE("amplitude embedding normalizes and guards the zero vector") {
    const std::vector<double> f = {3.0, 0.0, -4.0, 0.0};
    const QuantumState q = amplitude_embed(f, 2);
    CHECK(q.amplitudes[0].real() == doctest::Approx(0.6));
    CHECK(q.amplitudes[2].real() == doctest::Approx(-0.8));
    CHECK(q.norm_squared() == doctest::Approx(1.0));

    const std::vector<double> tiny(4, 1e-20);
    const QuantumState u = amplitude_embed(tiny, 2);
    for (const auto& a : u.amplitudes) {
        CHECK(a.real() == doctest::Approx(0.5));
    }

    const std::vector<double> wrong(5, 1.0);
    CHECK_THROWS_AS(amplitude_embed(wrong, 2), std::invalid_argument);
}

TEST_CASE("parameter counts follow the layer formulas") {
    AnsatzSpec s;
    s.n_qubits = 6;
    s.n_layers = 6;
    s.kind = AnsatzKind::strongly_entangling;
    CHECK(s.param_count() == 108);
    s.kind = AnsatzKind::basic_entangler;
    CHECK(s.param_count() == 36);
    s.kind = AnsatzKind::simplified_two_design;
    CHECK(s.param_count() == 66);

    s.kind = AnsatzKind::strongly_entangling;
    s.n_layers = 10;
    CHECK(s.param_count() == 180);
    s.n_qubits = 1;
    s.n_layers = 4;
    CHECK(s.param_count() == 12);
}

TEST_CASE("strongly entangling range cycles through 1..n-1") {
    AnsatzSpec s;
    s.n_qubits = 6;
    s.n_layers = 8;
    const std::vector<int> expected = {1, 2, 3, 4, 5, 1, 2, 3};
    for (int l = 0; l < 8; ++l) {
        CHECK(s.entangling_range(l) == expected[l]);
    }
    s.n_qubits = 2;
    CHECK(s.entangling_range(0) == 1);
    CHECK(s.entangling_range(5) == 1);
}

TEST_CASE("simplified two design with zero weights keeps zero layers trivial") {
    AnsatzSpec s;
    s.kind = AnsatzKind::simplified_two_design;
    s.n_qubits = 4;
    s.n_layers = 0;
    CHECK(s.param_count() == 4);
    const std::vector<double> f = {0.5, -0.5, 0.5, -0.5, 0.25, 0.25, 0.25, 0.25,
                                   0.1,  0.2,  0.3,  0.4,  -0.1, -0.2, -0.3, -0.4};
    const std::vector<double> zeros(4, 0.0);
    QuantumState q = amplitude_embed(f, 4);
    const QuantumState before = q;
    apply_ansatz(q, s, zeros);
    for (std::size_t i = 0; i < q.dim(); ++i) {
        CHECK(std::abs(q.amplitudes[i] - before.amplitudes[i]) < 1e-15);
    }
}

TEST_CASE("basic entangler on two qubits applies a single cnot per layer") {
    // With a ring of two, CNOT(0,1) followed by CNOT(1,0) would swap the
    // qubits instead of entangling them once; the layer keeps only the
    // first. Verified against the hand-built equivalent.
    AnsatzSpec s;
    s.kind = AnsatzKind::basic_entangler;
    s.n_qubits = 2;
    s.n_layers = 1;
    REQUIRE(s.param_count() == 2);
    const std::vector<double> params = {0.8, -0.4};
    const std::vector<double> f = {0.1, 0.9, -0.3, 0.2};

    QuantumState got = amplitude_embed(f, 2);
    apply_ansatz(got, s, params);

    QuantumState want = amplitude_embed(f, 2);
    apply_rx(want, 0, 0.8);
    apply_rx(want, 1, -0.4);
    apply_cnot(want, 0, 1);
    for (std::size_t i = 0; i < got.dim(); ++i) {
        CHECK(std::abs(got.amplitudes[i] - want.amplitudes[i]) < 1e-15);
    }
}

TEST_CASE("ansatz preserves the norm and rejects bad parameter counts") {
    std::mt19937_64 rng(11);
    for (AnsatzKind kind :
         {AnsatzKind::strongly_entangling, AnsatzKind::basic_entangler, AnsatzKind::simplified_two_design}) {
        AnsatzSpec s;
        s.kind = kind;
        s.n_qubits = 4;
        s.n_layers = 3;
        const std::vector<double> params = random_vector(rng, s.param_count(), 0.0, 2.0 * std::numbers::pi);
        const std::vector<double> f = random_vector(rng, 16, -1.0, 1.0);
        QuantumState q = amplitude_embed(f, 4);
        apply_ansatz(q, s, params);
        CHECK(q.norm_squared() == doctest::Approx(1.0).epsilon(1e-12));

        const std::vector<double> p = probabilities(q);
        double sum = 0.0;
        for (double x : p) {
            sum += x;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));

        std::vector<double> short_params(params.begin(), params.end() - 1);
        QuantumState r = amplitude_embed(f, 4);
        CHECK_THROWS_AS(apply_ansatz(r, s, short_params), std::invalid_argument);
    }
}

TEST_CASE("adjoint gradient matches central finite differences") {
    std::mt19937_64 rng(123);
    for (AnsatzKind kind :
         {AnsatzKind::strongly_entangling, AnsatzKind::basic_entangler, AnsatzKind::simplified_two_design}) {
        AnsatzSpec spec;
        spec.kind = kind;
        spec.n_qubits = 3;
        spec.n_layers = 2;
        const std::vector<double> params = random_vector(rng, spec.param_count(), 0.0, 2.0 * std::numbers::pi);
        const std::vector<double> features = random_vector(rng, 8, -1.0, 1.0);
        const std::vector<double> upstream = random_vector(rng, 8, -1.0, 1.0);

        const QuantumGradient grad = quantum_gradient(features, spec, params, upstream);

        const double h = 1e-5;
        for (std::size_t k = 0; k < params.size(); ++k) {
            std::vector<double> p = params;
            p[k] = params[k] + h;
            const double up = readout(features, spec, p, upstream);
            p[k] = params[k] - h;
            const double dn = readout(features, spec, p, upstream);
            const double fd = (up - dn) / (2.0 * h);
            CHECK(std::abs(grad.params[k] - fd) < 1e-5 * std::max(1.0, std::abs(fd)));
        }
        for (std::size_t k = 0; k < features.size(); ++k) {
            std::vector<double> f = features;
            f[k] = features[k] + h;
            const double up = readout(f, spec, params, upstream);
            f[k] = features[k] - h;
            const double dn = readout(f, spec, params, upstream);
            const double fd = (up - dn) / (2.0 * h);
            CHECK(std::abs(grad.features[k] - fd) < 1e-5 * std::max(1.0, std::abs(fd)));
        }
    }
}

TEST_CASE("adjoint gradient matches the parameter-shift rule") {
    // Every rotation generator has eigenvalues +-1/2, so the exact
    // derivative is (S(theta + pi/2) - S(theta - pi/2)) / 2; this route
    // shares no code with the reverse walk.
    std::mt19937_64 rng(321);
    for (AnsatzKind kind :
         {AnsatzKind::strongly_entangling, AnsatzKind::basic_entangler, AnsatzKind::simplified_two_design}) {
        AnsatzSpec spec;
        spec.kind = kind;
        spec.n_qubits = 4;
        spec.n_layers = 3;
        const std::vector<double> params = random_vector(rng, spec.param_count(), -3.0, 3.0);
        const std::vector<double> features = random_vector(rng, 16, -1.0, 1.0);
        const std::vector<double> upstream = random_vector(rng, 16, -1.0, 1.0);

        const QuantumGradient grad = quantum_gradient(features, spec, params, upstream);
        for (std::size_t k = 0; k < params.size(); ++k) {
            std::vector<double> p = params;
            p[k] = params[k] + std::numbers::pi / 2.0;
            const double up = readout(features, spec, p, upstream);
            p[k] = params[k] - std::numbers::pi / 2.0;
            const double dn = readout(features, spec, p, upstream);
            const double shift = (up - dn) / 2.0;
            CHECK(std::abs(grad.params[k] - shift) < 1e-10);
        }
    }
}

TEST_CASE("gradient respects the embedding structure") {
    AnsatzSpec spec;
    spec.n_qubits = 3;
    spec.n_layers = 2;
    std::mt19937_64 rng(55);
    const std::vector<double> params = random_vector(rng, spec.param_count(), 0.0, 6.0);
    const std::vector<double> features = random_vector(rng, 8, -2.0, 2.0);
    const std::vector<double> upstream = random_vector(rng, 8, -1.0, 1.0);

    SUBCASE("scale invariance makes the feature gradient orthogonal to f") {
        const QuantumGradient grad = quantum_gradient(features, spec, params, upstream);
        double dot = 0.0;
        for (std::size_t i = 0; i < features.size(); ++i) {
            dot += features[i] * grad.features[i];
        }
        CHECK(std::abs(dot) < 1e-12);
    }
    SUBCASE("below the norm threshold the feature gradient vanishes") {
        const std::vector<double> tiny(8, 1e-14);
        const QuantumGradient grad = quantum_gradient(tiny, spec, params, upstream);
        for (double g : grad.features) {
            CHECK(g == 0.0);
        }
    }
    SUBCASE("zero upstream yields exactly zero gradients") {
        const std::vector<double> zeros(8, 0.0);
        const QuantumGradient grad = quantum_gradient(features, spec, params, zeros);
        for (double g : grad.params) {
            CHECK(g == 0.0);
        }
        for (double g : grad.features) {
            CHECK(g == 0.0);
        }
    }
    SUBCASE("reusing the captured final state changes nothing") {
        QuantumState final_state;
        quantum_forward(features, spec, params, &final_state);
        const QuantumGradient a = quantum_gradient(features, spec, params, upstream, &final_state);
        const QuantumGradient b = quantum_gradient(features, spec, params, upstream);
        for (std::size_t i = 0; i < a.params.size(); ++i) {
            CHECK(a.params[i] == b.params[i]);
        }
        for (std::size_t i = 0; i < a.features.size(); ++i) {
            CHECK(a.features[i] == b.features[i]);
        }
    }
}
