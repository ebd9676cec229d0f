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

#include "qpic/hybrid.hpp"

#include <cmath>

#include "qpic/errors.hpp"
#include "qpic/metrics.hpp"

namespace qpic {

std::string rescale_mode_name(RescaleMode mode) {
    return mode == RescaleMode::calibrated ? "calibrated" : "oracle";
}

RescaleMode rescale_mode_from_name(const std::string& name) {
    if (name == "calibrated") {
        return RescaleMode::calibrated;
    }
    if (name == "oracle") {
        return RescaleMode::oracle;
    }
    throw ConfigError("unknown rescale mode '" + name + "' (expected calibrated or oracle)");
}

double calibrate_scale(const Dataset& data) {
    if (data.samples.empty()) {
        throw ConfigError("cannot calibrate on an empty dataset");
    }
    double sum = 0.0;
    for (const TrainSample& s : data.samples) {
        sum += s.s_phi / s.s_rho;
    }
    return sum / static_cast<double>(data.samples.size());
}

SurrogateSolver::SurrogateSolver(ModelSpec spec, std::vector<double> params, RescaleMode mode, double calibrated_scale)
    : spec_(spec), params_(std::move(params)), mode_(mode), calibrated_scale_(calibrated_scale) {
    spec_.validate();
    if (params_.size() != static_cast<std::size_t>(spec_.param_count())) {
        throw ConfigError("surrogate parameter count does not match its model spec");
    }
    if (mode_ == RescaleMode::calibrated && (!(calibrated_scale_ > 0.0) || !std::isfinite(calibrated_scale_))) {
        throw ConfigError("calibrated rescaling needs a positive finite scale");
    }
}

SurrogateSolver SurrogateSolver::from_checkpoint(const Checkpoint& checkpoint, RescaleMode mode,
                                                 double calibrated_scale) {
    return SurrogateSolver(checkpoint.spec, checkpoint.params, mode, calibrated_scale);
}

std::string SurrogateSolver::name() const {
    return "surrogate-" + model_kind_name(spec_.kind) + "-" + rescale_mode_name(mode_);
}

void SurrogateSolver::set_oracle_scale(double s_phi) {
    if (!(s_phi >= 0.0) || !std::isfinite(s_phi)) {
        throw ConfigError("oracle scale must be non-negative and finite");
    }
    oracle_scale_ = s_phi;
}

GridField SurrogateSolver::solve(const GridField& rho, const SimConfig& config) {
    if (static_cast<int>(rho.size()) != spec_.width || config.n_cells != spec_.width) {
        throw ConfigError("surrogate width " + std::to_string(spec_.width) + " does not match the grid");
    }
    GridField phi(rho.size(), FieldKind::potential);

    const double s_rho = rho.max_abs();
    if (s_rho < 1e-14) {
        return phi;  // no source, no field; the network never sees it
    }

    std::vector<double> rho_norm(rho.size());
    for (std::size_t i = 0; i < rho.size(); ++i) {
        rho_norm[i] = rho[i] / s_rho;
    }
    const std::vector<double> phi_norm = model_forward(spec_, params_, rho_norm, nullptr);

    double s_phi = 0.0;
    if (mode_ == RescaleMode::calibrated) {
        s_phi = calibrated_scale_ * s_rho;
    } else {
        if (!oracle_scale_.has_value()) {
            throw NumericError("oracle rescaling used without a paired exact scale");
        }
        s_phi = *oracle_scale_;
    }
    for (std::size_t i = 0; i < phi.size(); ++i) {
        phi[i] = phi_norm[i] * s_phi;
    }
    return phi;
}

RescaleMode SurrogateSolver::mode() const {
    return mode_;
}

HybridResult run_hybrid(const SimConfig& config, SurrogateSolver& surrogate, bool pair_baseline,
                        const RunOptions& options) {
    config.validate();
    HybridResult result;
    if (!pair_baseline) {
        // Without a baseline there is no per-step exact scale to read.
        if (surrogate.mode() == RescaleMode::oracle) {
            throw ConfigError("oracle rescaling requires pair_baseline");
        }
        result.hybrid = run_simulation(config, surrogate, options);
        return result;
    }

    SpectralPoissonSolver exact;
    if (config.n_steps == 0) {
        result.baseline = run_simulation(config, exact, options);
        const ParticleEnsemble initial = init_particles(config);
        surrogate.set_oracle_scale(exact.solve(deposit_charge(initial, config), config).max_abs());
        result.hybrid = run_simulation(config, surrogate, options);
        return result;
    }

    // The surrogate run needs the oracle scale of step 0 before its own
    // setup half-step, so the baseline always stays one substep ahead and
    // the hybrid loop is constructed lazily after the first exact solve.
    Simulation baseline(config, exact, options);
    std::optional<Simulation> hybrid;
    std::vector<PairedStepStats> comparison;
    comparison.reserve(config.n_steps);

    for (int s = 0; s < config.n_steps; ++s) {
        baseline.step();
        surrogate.set_oracle_scale(baseline.last_phi().max_abs());
        if (!hybrid.has_value()) {
            hybrid.emplace(config, surrogate, options);
        }
        hybrid->step();

        PairedStepStats stats;
        stats.step = s;
        stats.baseline_max_E = baseline.last_efield().max_abs();
        stats.hybrid_max_E = hybrid->last_efield().max_abs();
        stats.mrae_E = aggregate_relative_error(hybrid->last_efield().values, baseline.last_efield().values);
        comparison.push_back(stats);
    }

    result.hybrid = {hybrid->particles(), hybrid->diagnostics(), hybrid->frames(), hybrid->snapshots()};
    result.baseline = RunResult{baseline.particles(), baseline.diagnostics(), baseline.frames(), baseline.snapshots()};
    result.comparison = std::move(comparison);
    return result;
}

}  // namespace qpic
