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

#include "qpic/sim_config.hpp"

#include <cmath>

#include "qpic/errors.hpp"

namespace qpic {

std::string scenario_name(Scenario s) {
    return s == Scenario::two_stream ? "two_stream" : "thermal";
}

Scenario scenario_from_name(const std::string& name) {
    if (name == "two_stream") {
        return Scenario::two_stream;
    }
    if (name == "thermal") {
        return Scenario::thermal;
    }
    throw ConfigError("unknown scenario '" + name + "' (expected two_stream or thermal)");
}

void SimConfig::validate() const {
    if (!(domain_length > 0.0) || !std::isfinite(domain_length)) {
        throw ConfigError("domain_length must be positive and finite");
    }
    if (n_cells < 4) {
        throw ConfigError("n_cells must be at least 4");
    }
    if (particles_per_cell < 1) {
        throw ConfigError("particles_per_cell must be at least 1");
    }
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw ConfigError("dt must be positive and finite");
    }
    if (n_steps < 0) {
        throw ConfigError("n_steps must be non-negative");
    }
    if (perturbation_mode < 0) {
        throw ConfigError("perturbation_mode must be non-negative");
    }
    if (!std::isfinite(perturbation_amplitude) || perturbation_amplitude < 0.0) {
        throw ConfigError("perturbation_amplitude must be non-negative and finite");
    }
    if (scenario == Scenario::two_stream) {
        if (thermal_velocity != 0.0) {
            throw ConfigError("thermal_velocity must be 0 for the two_stream scenario");
        }
        if (!std::isfinite(beam_velocity)) {
            throw ConfigError("beam_velocity must be finite");
        }
    } else {
        if (beam_velocity != 0.0) {
            throw ConfigError("beam_velocity must be 0 for the thermal scenario");
        }
        if (!std::isfinite(thermal_velocity) || thermal_velocity < 0.0) {
            throw ConfigError("thermal_velocity must be non-negative and finite");
        }
    }
}

}  // namespace qpic
