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

#include "qpic/particles.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "qpic/errors.hpp"
#include "qpic/rng.hpp"

namespace qpic {

double ParticleEnsemble::kinetic_energy() const {
    double sum = 0.0;
    for (double vi : v) {
        sum += vi * vi;
    }
    return 0.5 * macro_mass * sum;
}

double wrap_position(double x, double length) {
    double w = std::fmod(x, length);
    if (w < 0.0) {
        w += length;
    }
    if (w >= length) {
        w = 0.0;
    }
    return w;
}

namespace {

// Equispaced quiet-start positions for one group of `count` particles.
void place_equispaced(std::vector<double>& x, int count, double length) {
    for (int j = 0; j < count; ++j) {
        x.push_back((j + 0.5) * length / count);
    }
}

}  // namespace

ParticleEnsemble init_particles(const SimConfig& config) {
    config.validate();
    const int n = config.total_particles();
    const double length = config.domain_length;

    ParticleEnsemble p;
    p.x.reserve(n);
    p.v.reserve(n);
    p.beam.reserve(n);
    // Total charge -1 and total mass 1 are split evenly, so the physics is
    // independent of the particle count.
    p.macro_charge = -1.0 / n;
    p.macro_mass = 1.0 / n;

    std::mt19937_64 rng(config.rng_seed);

    if (config.scenario == Scenario::two_stream) {
        const int n_plus = n / 2;
        const int n_minus = n - n_plus;
        if (config.random_loading) {
            for (int j = 0; j < n; ++j) {
                p.x.push_back(uniform_in(rng, 0.0, length));
            }
        } else {
            place_equispaced(p.x, n_plus, length);
            place_equispaced(p.x, n_minus, length);
        }
        for (int j = 0; j < n_plus; ++j) {
            p.v.push_back(config.beam_velocity);
            p.beam.push_back(0);
        }
        for (int j = 0; j < n_minus; ++j) {
            p.v.push_back(-config.beam_velocity);
            p.beam.push_back(1);
        }
    } else {
        if (config.random_loading) {
            for (int j = 0; j < n; ++j) {
                p.x.push_back(uniform_in(rng, 0.0, length));
            }
        } else {
            place_equispaced(p.x, n, length);
        }
        NormalSampler normal(rng);
        for (int j = 0; j < n; ++j) {
            p.v.push_back(config.thermal_velocity * normal());
            p.beam.push_back(0);
        }
    }

    // Seed the instability (or a stable Langmuir oscillation) by displacing
    // each particle along a sinusoid evaluated at its unperturbed position.
    const double amplitude = config.perturbation_amplitude * length;
    const double k = 2.0 * std::numbers::pi * config.perturbation_mode / length;
    for (int j = 0; j < n; ++j) {
        const double displaced = p.x[j] + amplitude * std::sin(k * p.x[j]);
        p.x[j] = wrap_position(displaced, length);
    }

    return p;
}

}  // namespace qpic
