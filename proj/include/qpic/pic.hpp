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

#ifndef QPIC_PIC_HPP
#define QPIC_PIC_HPP

#include <span>
#include <vector>

#include "qpic/grid.hpp"
#include "qpic/particles.hpp"
#include "qpic/poisson.hpp"
#include "qpic/sim_config.hpp"

namespace qpic {

// Cloud-in-cell deposit: each particle splits its charge over the two
// nearest nodes with linear weights, then counts are scaled to a density
// (divide by dx) and the +1 neutralizing background is added. The mean of
// the result is zero to round-off.
GridField deposit_charge(const ParticleEnsemble& particles, const SimConfig& config);

// E_i = -(phi_{i+1} - phi_{i-1}) / (2 dx), indices modulo n.
GridField electric_field(const GridField& phi, const SimConfig& config);

// Linear interpolation of the node field to particle positions, with the
// same weights as deposit_charge (momentum-conserving pairing).
std::vector<double> gather_field(const GridField& efield, const ParticleEnsemble& particles, const SimConfig& config);

// One leapfrog kick-drift: v += (q/m) E dt, then x += v dt with periodic
// wrap. Velocities are expected staggered half a step behind positions.
void push_particles(ParticleEnsemble& particles, std::span<const double> field_at_particles, double dt,
                    double domain_length);

struct DiagnosticsRow {
    int step = 0;
    double time = 0.0;
    double kinetic = 0.0;
    double field = 0.0;
    double total = 0.0;
    double max_abs_E = 0.0;
};

struct DiagnosticsSeries {
    std::vector<DiagnosticsRow> rows;
};

// Charge density and potential of one completed step, the training unit.
struct Frame {
    int step = 0;
    std::vector<double> rho;
    std::vector<double> phi;
};

struct PhaseSnapshot {
    int step = 0;
    std::vector<double> x;
    std::vector<double> v;
    std::vector<std::uint8_t> beam;
};

struct RunOptions {
    bool record_frames = false;
    int snapshot_stride = 0;  // 0: no phase-space snapshots
};

// Owns the per-run state of the leapfrog loop. Construction performs the
// setup half-step backward push so that velocities sit at t = -dt/2;
// step() then advances one full cycle: deposit, solve, differentiate,
// gather, push, diagnose.
class Simulation {
  public:
    Simulation(const SimConfig& config, PoissonSolver& solver, RunOptions options = {});

    void step();

    int current_step() const {
        return step_;
    }
    const SimConfig& config() const {
        return config_;
    }
    const ParticleEnsemble& particles() const {
        return particles_;
    }
    const DiagnosticsSeries& diagnostics() const {
        return diagnostics_;
    }
    const std::vector<Frame>& frames() const {
        return frames_;
    }
    const std::vector<PhaseSnapshot>& snapshots() const {
        return snapshots_;
    }

    // Fields of the most recent completed step (step() must have run).
    const GridField& last_rho() const {
        return last_rho_;
    }
    const GridField& last_phi() const {
        return last_phi_;
    }
    const GridField& last_efield() const {
        return last_efield_;
    }

  private:
    SimConfig config_;
    PoissonSolver& solver_;
    RunOptions options_;
    ParticleEnsemble particles_;
    DiagnosticsSeries diagnostics_;
    std::vector<Frame> frames_;
    std::vector<PhaseSnapshot> snapshots_;
    GridField last_rho_;
    GridField last_phi_;
    GridField last_efield_;
    int step_ = 0;
};

struct RunResult {
    ParticleEnsemble particles;
    DiagnosticsSeries diagnostics;
    std::vector<Frame> frames;
    std::vector<PhaseSnapshot> snapshots;
};

// Runs config.n_steps full steps. n_steps = 0 returns the unstaggered
// initial state with a single diagnostics row describing it.
RunResult run_simulation(const SimConfig& config, PoissonSolver& solver, const RunOptions& options = {});

// Diagnostics of the initial (unstaggered) state; also the n_steps = 0 row.
DiagnosticsRow initial_diagnostics(const SimConfig& config, PoissonSolver& solver);

}  // namespace qpic

#endif
