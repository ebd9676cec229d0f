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

#include "qpic/dataset.hpp"

#include <cmath>

#include "qpic/csv.hpp"
#include "qpic/errors.hpp"
#include "qpic/poisson.hpp"

namespace qpic {

std::optional<TrainSample> normalize_frame(const Frame& frame, double source_velocity) {
    double s_rho = 0.0;
    for (double v : frame.rho) {
        s_rho = std::max(s_rho, std::abs(v));
    }
    double s_phi = 0.0;
    for (double v : frame.phi) {
        s_phi = std::max(s_phi, std::abs(v));
    }
    if (s_rho < 1e-14 || s_phi < 1e-14) {
        return std::nullopt;
    }
    TrainSample sample;
    sample.s_rho = s_rho;
    sample.s_phi = s_phi;
    sample.source_velocity = source_velocity;
    sample.source_step = frame.step;
    sample.rho_norm.reserve(frame.rho.size());
    for (double v : frame.rho) {
        sample.rho_norm.push_back(v / s_rho);
    }
    sample.phi_norm.reserve(frame.phi.size());
    for (double v : frame.phi) {
        sample.phi_norm.push_back(v / s_phi);
    }
    return sample;
}

Dataset build_dataset(const std::vector<std::pair<double, std::vector<Frame>>>& runs, int samples_total,
                      double grid_dx, Scenario scenario) {
    if (samples_total < 1) {
        throw ConfigError("samples_total must be at least 1");
    }
    if (runs.empty()) {
        throw ConfigError("dataset needs at least one source run");
    }
    Dataset data;
    data.grid_dx = grid_dx;
    data.scenario = scenario;

    const int n_runs = static_cast<int>(runs.size());
    const int base_quota = samples_total / n_runs;
    const int remainder = samples_total % n_runs;

    for (int r = 0; r < n_runs; ++r) {
        const auto& [velocity, frames] = runs[r];
        const int quota = base_quota + (r < remainder ? 1 : 0);
        const int n_frames = static_cast<int>(frames.size());
        if (n_frames == 0) {
            throw ConfigError("source run " + std::to_string(r) + " recorded zero frames");
        }
        if (quota > n_frames) {
            throw ConfigError("source run " + std::to_string(r) + " has " + std::to_string(n_frames) +
                              " frames, fewer than its quota of " + std::to_string(quota));
        }
        for (int j = 0; j < quota; ++j) {
            const int idx = static_cast<int>((static_cast<long long>(j) * n_frames) / quota);
            std::optional<TrainSample> sample = normalize_frame(frames[idx], velocity);
            if (!sample.has_value()) {
                data.warnings.push_back("skipped degenerate frame " + std::to_string(frames[idx].step) +
                                        " of run " + std::to_string(r));
                continue;
            }
            data.samples.push_back(std::move(*sample));
        }
    }
    if (data.samples.empty()) {
        throw ConfigError("all selected frames were degenerate; no training data");
    }
    return data;
}

void write_dataset_csv(const std::filesystem::path& path, const Dataset& data) {
    if (data.samples.empty()) {
        throw ConfigError("refusing to write an empty dataset");
    }
    const std::size_t n = data.samples.front().rho_norm.size();
    CsvTable table;
    table.header = {"velocity", "step", "dx", "s_rho", "s_phi"};
    for (std::size_t i = 0; i < n; ++i) {
        table.header.push_back("rho_norm_" + std::to_string(i));
    }
    for (std::size_t i = 0; i < n; ++i) {
        table.header.push_back("phi_norm_" + std::to_string(i));
    }
    for (const TrainSample& s : data.samples) {
        if (s.rho_norm.size() != n || s.phi_norm.size() != n) {
            throw ConfigError("dataset has samples of mixed grid sizes");
        }
        std::vector<double> row;
        row.reserve(5 + 2 * n);
        row.push_back(s.source_velocity);
        row.push_back(static_cast<double>(s.source_step));
        row.push_back(data.grid_dx);
        row.push_back(s.s_rho);
        row.push_back(s.s_phi);
        row.insert(row.end(), s.rho_norm.begin(), s.rho_norm.end());
        row.insert(row.end(), s.phi_norm.begin(), s.phi_norm.end());
        table.rows.push_back(std::move(row));
    }
    write_csv(path, table);
}

Dataset read_dataset_csv(const std::filesystem::path& path) {
    const CsvTable table = read_csv(path);
    if (table.header.size() < 7 || (table.header.size() - 5) % 2 != 0) {
        throw ConfigError(path.string() + ": not a dataset file (bad column count)");
    }
    const std::size_t n = (table.header.size() - 5) / 2;
    const std::vector<std::string> meta = {"velocity", "step", "dx", "s_rho", "s_phi"};
    for (std::size_t i = 0; i < meta.size(); ++i) {
        if (table.header[i] != meta[i]) {
            throw ConfigError(path.string() + ": expected column '" + meta[i] + "', found '" + table.header[i] + "'");
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (table.header[5 + i] != "rho_norm_" + std::to_string(i) ||
            table.header[5 + n + i] != "phi_norm_" + std::to_string(i)) {
            throw ConfigError(path.string() + ": dataset field columns are misnamed or out of order");
        }
    }
    if (table.rows.empty()) {
        throw ConfigError(path.string() + ": dataset has no samples");
    }
    Dataset data;
    data.grid_dx = table.rows.front()[2];
    for (const std::vector<double>& row : table.rows) {
        TrainSample s;
        s.source_velocity = row[0];
        s.source_step = static_cast<int>(row[1]);
        s.s_rho = row[3];
        s.s_phi = row[4];
        s.rho_norm.assign(row.begin() + 5, row.begin() + 5 + n);
        s.phi_norm.assign(row.begin() + 5 + n, row.end());
        data.samples.push_back(std::move(s));
    }
    return data;
}

Dataset generate_dataset(const SimConfig& base, std::span<const double> velocities, int samples_total) {
    if (velocities.empty()) {
        throw ConfigError("dataset needs at least one source velocity");
    }
    std::vector<std::pair<double, std::vector<Frame>>> runs;
    runs.reserve(velocities.size());
    SpectralPoissonSolver solver;
    RunOptions options;
    options.record_frames = true;
    for (std::size_t r = 0; r < velocities.size(); ++r) {
        SimConfig config = base;
        if (config.scenario == Scenario::two_stream) {
            config.beam_velocity = velocities[r];
        } else {
            config.thermal_velocity = velocities[r];
        }
        config.rng_seed = base.rng_seed + r;
        RunResult result = run_simulation(config, solver, options);
        runs.emplace_back(velocities[r], std::move(result.frames));
    }
    return build_dataset(runs, samples_total, base.dx(), base.scenario);
}

}  // namespace qpic
