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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "qpic/errors.hpp"
#include "qpic/hybrid.hpp"
#include "qpic/train.hpp"

using namespace qpic;

namespace {

ModelSpec cqc8() {
    ModelSpec spec;
    spec.kind = ModelKind::cqc;
    spec.width = 8;
    spec.ansatz.n_qubits = 3;
    spec.ansatz.n_layers = 2;
    return spec;
}

SimConfig coarse_config() {
    SimConfig c;
    c.n_cells = 8;
    c.particles_per_cell = 32;
    c.beam_velocity = 0.2;
    c.perturbation_amplitude = 2e-2;
    c.dt = 0.05;
    c.n_steps = 10;
    return c;
}

}  // namespace

TEST_CASE("rescale mode names round-trip") {
    CHECK(rescale_mode_name(RescaleMode::calibrated) == "calibrated");
    CHECK(rescale_mode_name(RescaleMode::oracle) == "oracle");
    CHECK(rescale_mode_from_name("oracle") == RescaleMode::oracle);
    CHECK_THROWS_AS(rescale_mode_from_name("psychic"), ConfigError);
}

TEST_CASE("calibrate_scale averages the per-sample scale ratio") {
    Dataset data;
    TrainSample a;
    a.s_rho = 1.0;
    a.s_phi = 2.0;
    TrainSample b;
    b.s_rho = 2.0;
    b.s_phi = 8.0;
    data.samples = {a, b};
    CHECK(calibrate_scale(data) == doctest::Approx(3.0));
    CHECK_THROWS_AS(calibrate_scale(Dataset{}), ConfigError);
}

TEST_CASE("surrogate construction is validated") {
    const ModelSpec spec = cqc8();
    const std::vector<double> params = init_params(spec, 1);
    CHECK_THROWS_AS(SurrogateSolver(spec, std::vector<double>(3, 0.0), RescaleMode::calibrated, 1.0), ConfigError);
    CHECK_THROWS_AS(SurrogateSolver(spec, params, RescaleMode::calibrated, 0.0), ConfigError);
    CHECK_THROWS_AS(SurrogateSolver(spec, params, RescaleMode::calibrated, -2.0), ConfigError);
    // Oracle mode needs no calibrated scale.
    CHECK_NOTHROW(SurrogateSolver(spec, params, RescaleMode::oracle));

    SurrogateSolver s(spec, params, RescaleMode::calibrated, 1.5);
    CHECK(s.name() == "surrogate-cqc-calibrated");
    CHECK(s.mode() == RescaleMode::calibrated);
}

TEST_CASE("from_checkpoint carries the spec and parameters over") {
    Checkpoint ck;
    ck.spec = cqc8();
    ck.seed = 3;
    ck.params = init_params(ck.spec, 3);
    SurrogateSolver s = SurrogateSolver::from_checkpoint(ck, RescaleMode::calibrated, 2.0);
    CHECK(s.spec() == ck.spec);

    const SimConfig config = coarse_config();
    GridField rho(8, FieldKind::charge_density);
    rho.values = {0.1, -0.1, 0.05, -0.05, 0.02, -0.02, 0.01, -0.01};
    const GridField phi = s.solve(rho, config);
    REQUIRE(phi.size() == 8);
    CHECK(phi.kind == FieldKind::potential);

    // Calibrated rescale: phi = model(rho / s_rho) * c * s_rho.
    const std::vector<double> rho_norm = {1.0, -1.0, 0.5, -0.5, 0.2, -0.2, 0.1, -0.1};
    const std::vector<double> out = model_forward(ck.spec, ck.params, rho_norm);
    for (int i = 0; i < 8; ++i) {
        CHECK(phi[i] == doctest::Approx(out[i] * 2.0 * 0.1).epsilon(1e-12));
    }
}

TEST_CASE("surrogate maps vanishing charge density to zero potential") {
    SurrogateSolver s(cqc8(), init_params(cqc8(), 1), RescaleMode::calibrated, 1.0);
    const GridField rho(8, FieldKind::charge_density);
    const GridField phi = s.solve(rho, coarse_config());
    for (int i = 0; i < 8; ++i) {
        CHECK(phi[i] == 0.0);
    }
}

TEST_CASE("surrogate rejects mismatched sizes") {
    SurrogateSolver s(cqc8(), init_params(cqc8(), 1), RescaleMode::calibrated, 1.0);
    SimConfig config = coarse_config();
    const GridField bad(6, FieldKind::charge_density);
    CHECK_THROWS_AS(s.solve(bad, config), ConfigError);
    config.n_cells = 16;  // grid no longer matches the model width
    const GridField rho(16, FieldKind::charge_density);
    CHECK_THROWS_AS(s.solve(rho, config), ConfigError);
}

TEST_CASE("oracle mode demands a scale before solving") {
    SurrogateSolver s(cqc8(), init_params(cqc8(), 1), RescaleMode::oracle);
    GridField rho(8, FieldKind::charge_density);
    rho.values[0] = 0.5;
    rho.values[1] = -0.5;
    CHECK_THROWS_AS(s.solve(rho, coarse_config()), NumericError);
    s.set_oracle_scale(0.25);
    CHECK_NOTHROW(s.solve(rho, coarse_config()));
    CHECK_THROWS_AS(s.set_oracle_scale(-1.0), ConfigError);
}

TEST_CASE("paired hybrid run tracks the baseline step by step") {
    const SimConfig config = coarse_config();
    SurrogateSolver s(cqc8(), init_params(cqc8(), 7), RescaleMode::calibrated, 1.0);
    const HybridResult result = run_hybrid(config, s, /*pair_baseline=*/true);

    REQUIRE(result.baseline.has_value());
    REQUIRE(result.comparison.size() == 10);
    REQUIRE(result.hybrid.diagnostics.rows.size() == 10);
    REQUIRE(result.baseline->diagnostics.rows.size() == 10);

    // The paired baseline is the plain exact run, bit for bit.
    SpectralPoissonSolver exact;
    const RunResult plain = run_simulation(config, exact);
    const auto& plain_rows = plain.diagnostics.rows;
    const auto& base_rows = result.baseline->diagnostics.rows;
    REQUIRE(plain_rows.size() == base_rows.size());
    for (std::size_t i = 0; i < plain_rows.size(); ++i) {
        CHECK(plain_rows[i].total == base_rows[i].total);
        CHECK(plain_rows[i].max_abs_E == base_rows[i].max_abs_E);
    }
    for (std::size_t i = 0; i < plain.particles.x.size(); ++i) {
        CHECK(plain.particles.x[i] == result.baseline->particles.x[i]);
    }

    for (const PairedStepStats& row : result.comparison) {
        CHECK(std::isfinite(row.mrae_E));
        CHECK(row.mrae_E >= 0.0);
        CHECK(row.baseline_max_E > 0.0);
        CHECK(std::isfinite(row.hybrid_max_E));
    }
    CHECK(result.comparison.front().step == 0);
    CHECK(result.comparison.back().step == 9);

    // An untrained surrogate is not the exact solver: trajectories split.
    CHECK(result.hybrid.diagnostics.rows.back().total != plain_rows.back().total);
}

TEST_CASE("oracle rescaling needs the paired baseline") {
    SurrogateSolver s(cqc8(), init_params(cqc8(), 7), RescaleMode::oracle);
    CHECK_THROWS_AS(run_hybrid(coarse_config(), s, /*pair_baseline=*/false), ConfigError);
    const HybridResult result = run_hybrid(coarse_config(), s, /*pair_baseline=*/true);
    CHECK(result.comparison.size() == 10);
}

TEST_CASE("unpaired hybrid run returns no comparison") {
    SurrogateSolver s(cqc8(), init_params(cqc8(), 7), RescaleMode::calibrated, 1.0);
    const HybridResult result = run_hybrid(coarse_config(), s, /*pair_baseline=*/false);
    CHECK_FALSE(result.baseline.has_value());
    CHECK(result.comparison.empty());
    CHECK(result.hybrid.diagnostics.rows.size() == 10);
}

TEST_CASE("zero-step paired run still calibrates and reports nothing") {
    SimConfig config = coarse_config();
    config.n_steps = 0;
    SurrogateSolver s(cqc8(), init_params(cqc8(), 7), RescaleMode::oracle);
    const HybridResult result = run_hybrid(config, s, /*pair_baseline=*/true);
    CHECK(result.comparison.empty());
    REQUIRE(result.baseline.has_value());
    CHECK(result.hybrid.diagnostics.rows.size() == 1);
}
