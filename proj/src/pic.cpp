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

#include "qpic/pic.hpp"

#include <cmath>

#include "qpic/errors.hpp"

namespace qpic {

namespace {

// CIC weights of one particle: node `left` takes (1 - frac), node
// (left+1) mod n takes frac. Shared by deposit and gather so the force a
// particle feels from its own deposited charge cancels exactly.
struct CicWeights {
    int left;
    int right;
    double w_left;
    double w_right;
};

inline CicWeights cic_weights(double x, double dx, int n) {
    double s = x / dx;
    int left = static_cast<int>(s);
    if (left >= n) {
        left = n - 1;  // x just below L can round up to n
    }
    const double frac = s - left;
    return {left, left + 1 == n ? 0 : left + 1, 1.0 - frac, frac};
}

}  // namespace

GridField deposit_charge(const ParticleEnsemble& particles, const SimConfig& config) {
    const int n = config.n_cells;
    const double dx = config.dx();
    GridField rho(n, FieldKind::charge_density);

    for (std::size_t p = 0; p < particles.size(); ++p) {
        const CicWeights w = cic_weights(particles.x[p], dx, n);
        rho[w.left] += w.w_left;
        rho[w.right] += w.w_right;
    }

    // Counts to density, plus the uniform neutralizing background. The
    // electrons carry total charge -1 spread over the domain, so a
    // background density 1/L makes the mean vanish (1 at the default L=1).
    const double background = 1.0 / config.domain_length;
    const double scale = particles.macro_charge / dx;
    for (int i = 0; i < n; ++i) {
        rho[i] = rho[i] * scale + background;
    }
    return rho;
}

GridField electric_field(const GridField& phi, const SimConfig& config) {
    const int n = static_cast<int>(phi.size());
    if (n != config.n_cells) {
        throw ConfigError("potential grid size does not match config");
    }
    const double inv_2dx = 1.0 / (2.0 * config.dx());
    GridField efield(n, FieldKind::electric_field);
    for (int i = 0; i < n; ++i) {
        const int prev = i == 0 ? n - 1 : i - 1;
        const int next = i + 1 == n ? 0 : i + 1;
        efield[i] = -(phi[next] - phi[prev]) * inv_2dx;
    }
    return efield;
}

std::vector<double> gather_field(const GridField& efield, const ParticleEnsemble& particles, const SimConfig& config) {
    const int n = static_cast<int>(efield.size());
    if (n != config.n_cells) {
        throw ConfigError("field grid size does not match config");
    }
    const double dx = config.dx();
    std::vector<double> at_particles(particles.size());
    for (std::size_t p = 0; p < particles.size(); ++p) {
        const CicWeights w = cic_weights(particles.x[p], dx, n);
        at_particles[p] = w.w_left * efield[w.left] + w.w_right * efield[w.right];
    }
    return at_particles;
}

void push_particles(ParticleEnsemble& particles, std::span<const double> field_at_particles, double dt,
                    double domain_length) {
    if (field_at_particles.size() != particles.size()) {
        throw ConfigError("field sample count does not match particle count");
    }
    const double charge_over_mass = particles.macro_charge / particles.macro_mass;
    for (std::size_t p = 0; p < particles.size(); ++p) {
        particles.v[p] += charge_over_mass * field_at_particles[p] * dt;
        particles.x[p] = wrap_position(particles.x[p] + particles.v[p] * dt, domain_length);
    }
}

namespace {

double field_energy(const GridField& efield, double dx) {
    double sum = 0.0;
    for (double e : efield.values) {
        sum += e * e;
    }
    return 0.5 * dx * sum;
}

}  // namespace

Simulation::Simulation(const SimConfig& config, PoissonSolver& solver, RunOptions options)
    : config_(config), solver_(solver), options_(options) {
    config_.validate();
    particles_ = init_particles(config_);

    // Half-step backward push: evaluate the t=0 field and move velocities
    // to t = -dt/2 so the leapfrog kick lands them on half-integer times.
    const GridField rho = deposit_charge(particles_, config_);
    const GridField phi = solver_.solve(rho, config_);
    const GridField efield = electric_field(phi, config_);
    const std::vector<double> sampled = gather_field(efield, particles_, config_);
    const double half_kick = particles_.macro_charge / particles_.macro_mass * 0.5 * config_.dt;
    for (std::size_t p = 0; p < particles_.size(); ++p) {
        particles_.v[p] -= half_kick * sampled[p];
    }
}

void Simulation::step() {
    // Fields of the state at t = step_ * dt.
    last_rho_ = deposit_charge(particles_, config_);
    last_phi_ = solver_.solve(last_rho_, config_);
    last_efield_ = electric_field(last_phi_, config_);
    const std::vector<double> sampled = gather_field(last_efield_, particles_, config_);

    if (options_.record_frames) {
        frames_.push_back({step_, last_rho_.values, last_phi_.values});
    }

    // The kinetic energy at integer time t is estimated from the staggered
    // velocities as (m/2) sum v(t - dt/2) v(t + dt/2); second-order, and
    // conserved together with the field energy of the same step.
    const std::vector<double> v_before = particles_.v;
    push_particles(particles_, sampled, config_.dt, config_.domain_length);

    double kinetic = 0.0;
    for (std::size_t p = 0; p < particles_.size(); ++p) {
        kinetic += v_before[p] * particles_.v[p];
    }
    kinetic *= 0.5 * particles_.macro_mass;

    DiagnosticsRow row;
    row.step = step_;
    row.time = step_ * config_.dt;
    row.kinetic = kinetic;
    row.field = field_energy(last_efield_, config_.dx());
    row.total = row.kinetic + row.field;
    row.max_abs_E = last_efield_.max_abs();
    if (!std::isfinite(row.total) || !std::isfinite(row.max_abs_E)) {
        throw NumericError("simulation diverged at step " + std::to_string(step_));
    }
    diagnostics_.rows.push_back(row);

    if (options_.snapshot_stride > 0 && step_ % options_.snapshot_stride == 0) {
        snapshots_.push_back({step_, particles_.x, particles_.v, particles_.beam});
    }
    ++step_;
}

DiagnosticsRow initial_diagnostics(const SimConfig& config, PoissonSolver& solver) {
    const ParticleEnsemble particles = init_particles(config);
    const GridField rho = deposit_charge(particles, config);
    const GridField phi = solver.solve(rho, config);
    const GridField efield = electric_field(phi, config);

    DiagnosticsRow row;
    row.step = 0;
    row.time = 0.0;
    row.kinetic = particles.kinetic_energy();
    row.field = field_energy(efield, config.dx());
    row.total = row.kinetic + row.field;
    row.max_abs_E = efield.max_abs();
    return row;
}

RunResult run_simulation(const SimConfig& config, PoissonSolver& solver, const RunOptions& options) {
    config.validate();
    if (config.n_steps == 0) {
        RunResult result;
        result.particles = init_particles(config);
        result.diagnostics.rows.push_back(initial_diagnostics(config, solver));
        return result;
    }
    Simulation sim(config, solver, options);
    for (int s = 0; s < config.n_steps; ++s) {
        sim.step();
    }
    return {sim.particles(), sim.diagnostics(), sim.frames(), sim.snapshots()};
}

}  // namespace qpic
