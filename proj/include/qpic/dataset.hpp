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

#ifndef QPIC_DATASET_HPP
#define QPIC_DATASET_HPP

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qpic/pic.hpp"
#include "qpic/sim_config.hpp"

namespace qpic {

// One (rho, phi) pair rescaled to [-1, 1] by its own max-abs values. The
// scales are kept so physical fields can be reconstructed.
struct TrainSample {
    std::vector<double> rho_norm;
    std::vector<double> phi_norm;
    double s_rho = 1.0;
    double s_phi = 1.0;
    double source_velocity = 0.0;
    int source_step = 0;
};

struct Dataset {
    std::vector<TrainSample> samples;
    double grid_dx = 0.0;
    Scenario scenario = Scenario::two_stream;
    std::vector<std::string> warnings;  // degenerate frames skipped, etc.
};

// Degenerate frames (max_abs below 1e-14 on either field) normalize to
// nullopt; dividing by their scale would amplify noise.
std::optional<TrainSample> normalize_frame(const Frame& frame, double source_velocity);

// Selects `samples_total` frames spread over the runs: the quota is split
// evenly (remainder to the earlier runs), and within one run frame j of
// quota q sits at index floor(j * n_frames / q). Degenerate frames are
// skipped with a warning, so the result can come up short.
Dataset build_dataset(const std::vector<std::pair<double, std::vector<Frame>>>& runs, int samples_total,
                      double grid_dx, Scenario scenario);

// Runs one simulation per velocity (seed = base.rng_seed + run index) with
// frame recording and assembles the training set from the recorded frames.
// For two_stream the velocity is the beam speed, for thermal the spread.
Dataset generate_dataset(const SimConfig& base, std::span<const double> velocities, int samples_total);

// velocity,step,dx,s_rho,s_phi,rho_norm_0..,phi_norm_0..; one sample per
// row, doubles serialized so the file round-trips bit-exactly.
void write_dataset_csv(const std::filesystem::path& path, const Dataset& data);
Dataset read_dataset_csv(const std::filesystem::path& path);

}  // namespace qpic

#endif
