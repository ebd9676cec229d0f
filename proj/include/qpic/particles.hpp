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

#ifndef QPIC_PARTICLES_HPP
#define QPIC_PARTICLES_HPP

#include <cstdint>
#include <vector>

#include "qpic/sim_config.hpp"

namespace qpic {

// Macro-particle ensemble in structure-of-arrays layout. All particles
// share one charge and one mass; positions live in [0, L).
struct ParticleEnsemble {
    std::vector<double> x;
    std::vector<double> v;
    std::vector<std::uint8_t> beam;  // 0: +v0 beam, 1: -v0 beam (or Maxwellian bulk)
    double macro_charge = 0.0;
    double macro_mass = 0.0;

    std::size_t size() const {
        return x.size();
    }

    double kinetic_energy() const;
};

// Maps any real position onto [0, L). fmod alone can return L exactly for
// tiny negative inputs, so the result is re-checked.
double wrap_position(double x, double length);

// Builds the initial ensemble for the configured scenario. The quiet start
// places particles at equispaced positions (per beam for two_stream); the
// sinusoidal perturbation then displaces each particle by
// A * L * sin(2 pi m x0 / L) evaluated at its unperturbed position.
ParticleEnsemble init_particles(const SimConfig& config);

}  // namespace qpic

#endif
