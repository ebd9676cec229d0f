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

#ifndef QPIC_SIM_CONFIG_HPP
#define QPIC_SIM_CONFIG_HPP

#include <cstdint>
#include <string>

namespace qpic {

enum class Scenario {
    two_stream,
    thermal,
};

std::string scenario_name(Scenario s);
Scenario scenario_from_name(const std::string& name);

// Dimensionless 1D electrostatic setup on a periodic domain. Units are
// chosen so that the uniform electron density, the plasma frequency and
// |q/m| are all 1; a fixed background of charge +1 neutralizes the
// electrons, whose total charge is -1 and total mass 1 regardless of the
// particle count.
struct SimConfig {
    double domain_length = 1.0;
    int n_cells = 64;
    int particles_per_cell = 200;
    double dt = 0.05;
    int n_steps = 1000;
    Scenario scenario = Scenario::two_stream;
    double beam_velocity = 0.0;            // two_stream: beams at +/- this speed
    double thermal_velocity = 0.0;         // thermal: stddev of the Maxwellian
    double perturbation_amplitude = 1e-3;  // sinusoidal displacement, units of domain_length
    int perturbation_mode = 1;
    bool random_loading = false;  // uniform random positions instead of the quiet start
    std::uint64_t rng_seed = 1;

    double dx() const {
        return domain_length / n_cells;
    }
    int total_particles() const {
        return n_cells * particles_per_cell;
    }

    // Throws ConfigError on any violated constraint.
    void validate() const;
};

}  // namespace qpic

#endif
