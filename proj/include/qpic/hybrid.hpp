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

#ifndef QPIC_HYBRID_HPP
#define QPIC_HYBRID_HPP

#include <optional>
#include <string>
#include <vector>

#include "qpic/dataset.hpp"
#include "qpic/nn.hpp"
#include "qpic/pic.hpp"
#include "qpic/poisson.hpp"

namespace qpic {

// The surrogate predicts the normalized potential, so its output must be
// rescaled to physical units before differencing:
//   calibrated: s_phi is estimated as c * max|rho| with a constant c
//               fitted on the training set (self-contained, deployable);
//   oracle:     s_phi is taken from a paired exact run at the same step
//               (upper bound on achievable fidelity, needs the baseline).
enum class RescaleMode {
    calibrated,
    oracle,
};

std::string rescale_mode_name(RescaleMode mode);
RescaleMode rescale_mode_from_name(const std::string& name);

// Mean of s_phi / s_rho over the training samples.
double calibrate_scale(const Dataset& data);

// Drop-in Poisson solver backed by a trained model.
class SurrogateSolver final : public PoissonSolver {
  public:
    SurrogateSolver(ModelSpec spec, std::vector<double> params, RescaleMode mode, double calibrated_scale = 0.0);
    static SurrogateSolver from_checkpoint(const Checkpoint& checkpoint, RescaleMode mode,
                                           double calibrated_scale = 0.0);

    GridField solve(const GridField& rho, const SimConfig& config) override;
    std::string name() const override;

    // Oracle mode: must be fed max|phi_exact| of the upcoming step.
    void set_oracle_scale(double s_phi);

    const ModelSpec& spec() const {
        return spec_;
    }
    RescaleMode mode() const;

  private:
    ModelSpec spec_;
    std::vector<double> params_;
    RescaleMode mode_;
    double calibrated_scale_;
    std::optional<double> oracle_scale_;
};

struct PairedStepStats {
    int step = 0;
    double mrae_E = 0.0;  // sum |E_hyb - E_base| / sum |E_base| over the grid
    double baseline_max_E = 0.0;
    double hybrid_max_E = 0.0;
};

struct HybridResult {
    RunResult hybrid;
    std::optional<RunResult> baseline;
    std::vector<PairedStepStats> comparison;  // one row per step when paired
};

// Runs the PIC loop with the surrogate in place of the exact solver. With
// pair_baseline an exact run advances in lockstep from the same initial
// state and per-step field errors are recorded; oracle rescaling requires
// the pairing since it reads the exact scale each step.
HybridResult run_hybrid(const SimConfig& config, SurrogateSolver& surrogate, bool pair_baseline,
                        const RunOptions& options = {});

}  // namespace qpic

#endif
