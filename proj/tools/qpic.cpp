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

// Command-line entry point: generate | train | simulate | evaluate.
//
// Every command reads one JSON config file (unknown keys are rejected by
// name), takes a few overriding flags, and writes its artifacts plus a
// manifest.json into the output directory. All randomness is seeded, so a
// rerun with the same resolved config reproduces every artifact byte for
// byte; wall-clock timings go to stdout only, never into artifacts.
//
// Exit codes: 0 success, 2 configuration/usage error, 1 runtime failure.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qpic/csv.hpp"
#include "qpic/dataset.hpp"
#include "qpic/errors.hpp"
#include "qpic/hybrid.hpp"
#include "qpic/metrics.hpp"
#include "qpic/nn.hpp"
#include "qpic/pic.hpp"
#include "qpic/poisson.hpp"
#include "qpic/sim_config.hpp"
#include "qpic/train.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace qpic;

namespace {

constexpr const char* kVersion = "0.1.0";

// ---------------------------------------------------------------- config

json load_config_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file: " + path.string());
    }
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
    }
}

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) {
        throw ConfigError(where + " must be a JSON object");
    }
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (allowed.find(it.key()) == allowed.end()) {
            throw ConfigError("unknown config key '" + it.key() + "' in " + where);
        }
    }
}

[[noreturn]] void bad_key(const std::string& key, const char* what) {
    throw ConfigError("config key '" + key + "' must be " + what);
}

double get_number(const json& j, const std::string& key, double fallback) {
    if (!j.contains(key)) {
        return fallback;
    }
    if (!j.at(key).is_number()) {
        bad_key(key, "a number");
    }
    return j.at(key).get<double>();
}

int get_int(const json& j, const std::string& key, int fallback) {
    if (!j.contains(key)) {
        return fallback;
    }
    if (!j.at(key).is_number_integer()) {
        bad_key(key, "an integer");
    }
    return j.at(key).get<int>();
}

std::uint64_t get_seed(const json& j, const std::string& key, std::uint64_t fallback) {
    if (!j.contains(key)) {
        return fallback;
    }
    const json& v = j.at(key);
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0)) {
        bad_key(key, "a non-negative integer");
    }
    return v.get<std::uint64_t>();
}

bool get_bool(const json& j, const std::string& key, bool fallback) {
    if (!j.contains(key)) {
        return fallback;
    }
    if (!j.at(key).is_boolean()) {
        bad_key(key, "a boolean");
    }
    return j.at(key).get<bool>();
}

std::string get_string(const json& j, const std::string& key, const std::string& fallback) {
    if (!j.contains(key)) {
        return fallback;
    }
    if (!j.at(key).is_string()) {
        bad_key(key, "a string");
    }
    return j.at(key).get<std::string>();
}

std::string require_string(const json& j, const std::string& key) {
    if (!j.contains(key)) {
        throw ConfigError("missing required config key '" + key + "'");
    }
    if (!j.at(key).is_string()) {
        bad_key(key, "a string");
    }
    return j.at(key).get<std::string>();
}

int require_int(const json& j, const std::string& key) {
    if (!j.contains(key)) {
        throw ConfigError("missing required config key '" + key + "'");
    }
    if (!j.at(key).is_number_integer()) {
        bad_key(key, "an integer");
    }
    return j.at(key).get<int>();
}

std::vector<double> require_number_list(const json& j, const std::string& key) {
    if (!j.contains(key)) {
        throw ConfigError("missing required config key '" + key + "'");
    }
    const json& v = j.at(key);
    if (!v.is_array()) {
        bad_key(key, "a list of numbers");
    }
    std::vector<double> out;
    for (const json& x : v) {
        if (!x.is_number()) {
            bad_key(key, "a list of numbers");
        }
        out.push_back(x.get<double>());
    }
    return out;
}

// Shared simulation keys of the generate and simulate configs.
SimConfig parse_sim_config(const json& j) {
    SimConfig c;
    c.scenario = scenario_from_name(get_string(j, "scenario", "two_stream"));
    c.domain_length = get_number(j, "domain_length", c.domain_length);
    c.n_cells = get_int(j, "n_cells", c.n_cells);
    c.particles_per_cell = get_int(j, "particles_per_cell", c.particles_per_cell);
    c.dt = get_number(j, "dt", c.dt);
    c.n_steps = get_int(j, "steps", c.n_steps);
    c.perturbation_amplitude = get_number(j, "perturbation_amplitude", c.perturbation_amplitude);
    c.perturbation_mode = get_int(j, "perturbation_mode", c.perturbation_mode);
    c.random_loading = get_bool(j, "random_loading", c.random_loading);
    c.rng_seed = get_seed(j, "seed", c.rng_seed);
    return c;
}

json echo_sim_config(const SimConfig& c) {
    json j;
    j["scenario"] = scenario_name(c.scenario);
    j["domain_length"] = c.domain_length;
    j["n_cells"] = c.n_cells;
    j["particles_per_cell"] = c.particles_per_cell;
    j["dt"] = c.dt;
    j["steps"] = c.n_steps;
    j["perturbation_amplitude"] = c.perturbation_amplitude;
    j["perturbation_mode"] = c.perturbation_mode;
    j["random_loading"] = c.random_loading;
    j["seed"] = c.rng_seed;
    return j;
}

// --------------------------------------------------------------- outputs

void write_text_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ConfigError("cannot open " + path.string() + " for writing");
    }
    out << content;
    if (!out) {
        throw NumericError("failed while writing " + path.string());
    }
}

// Manifest: the full resolved config plus a hash of every file the command
// read or produced. Identical manifests imply byte-identical artifacts.
// Timing logs are listed as "volatile" instead of hashed: their bytes hold
// wall-clock measurements, which no rerun can reproduce.
void write_manifest(const fs::path& out_dir, const std::string& command, const json& resolved_config,
                    const std::vector<fs::path>& inputs, const std::vector<fs::path>& outputs,
                    const std::vector<fs::path>& volatile_outputs = {}) {
    json m;
    m["tool"] = std::string("qpic ") + kVersion;
    m["command"] = command;
    m["config"] = resolved_config;
    json in = json::array();
    for (const fs::path& p : inputs) {
        in.push_back({{"path", p.string()}, {"fnv1a64", file_hash_hex(p)}});
    }
    m["inputs"] = in;
    json out = json::array();
    for (const fs::path& p : outputs) {
        out.push_back({{"path", p.filename().string()}, {"fnv1a64", file_hash_hex(p)}});
    }
    for (const fs::path& p : volatile_outputs) {
        out.push_back({{"path", p.filename().string()}, {"fnv1a64", "volatile"}});
    }
    m["outputs"] = out;
    write_text_file(out_dir / "manifest.json", m.dump(2) + "\n");
}

fs::path resolve_out_dir(const json& cfg, const std::optional<std::string>& override_dir) {
    const std::string dir = override_dir.has_value() ? *override_dir : get_string(cfg, "out_dir", "qpic-out");
    if (dir.empty()) {
        throw ConfigError("out_dir must not be empty");
    }
    fs::create_directories(dir);
    return dir;
}

void write_run_artifacts(const fs::path& out_dir, const std::string& prefix, const RunResult& run,
                         const RunOptions& options, std::vector<fs::path>& outputs) {
    const fs::path diag = out_dir / (prefix + "diagnostics.csv");
    write_diagnostics_csv(diag, run.diagnostics);
    outputs.push_back(diag);

    const fs::path phase = out_dir / (prefix + "phase_space.csv");
    write_phase_space_csv(phase, run.particles);
    outputs.push_back(phase);

    if (options.record_frames) {
        const fs::path frames = out_dir / (prefix + "frames.csv");
        write_frames_csv(frames, run.frames);
        outputs.push_back(frames);
    }
    for (const PhaseSnapshot& snap : run.snapshots) {
        const fs::path p = out_dir / (prefix + "snapshot_" + std::to_string(snap.step) + ".csv");
        write_phase_space_csv(p, snap);
        outputs.push_back(p);
    }
}

// ---------------------------------------------------------------- common

struct Overrides {
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;
    bool pair_baseline = false;
};

LossKind loss_kind_from_name(const std::string& name) {
    if (name == "data") {
        return LossKind::data;
    }
    if (name == "pinn") {
        return LossKind::pinn;
    }
    throw ConfigError("unknown loss '" + name + "'; use data or pinn");
}

std::string loss_kind_name(LossKind kind) {
    return kind == LossKind::data ? "data" : "pinn";
}

ResidualConvention residual_from_name(const std::string& name) {
    if (name == "physical") {
        return ResidualConvention::physical;
    }
    if (name == "normalized_index") {
        return ResidualConvention::normalized_index;
    }
    throw ConfigError("unknown residual_convention '" + name + "'; use physical or normalized_index");
}

std::string residual_name(ResidualConvention c) {
    return c == ResidualConvention::physical ? "physical" : "normalized_index";
}

int log2_exact(int width) {
    int q = 0;
    int w = width;
    while (w > 1 && w % 2 == 0) {
        w /= 2;
        ++q;
    }
    if (w != 1 || q == 0) {
        throw ConfigError("width " + std::to_string(width) + " is not a power of two >= 2");
    }
    return q;
}

// -------------------------------------------------------------- generate

int cmd_generate(const fs::path& config_path, const Overrides& ov) {
    const json cfg = load_config_file(config_path);
    check_keys(cfg,
               {"scenario", "velocities", "samples", "n_cells", "particles_per_cell", "dt", "steps", "domain_length",
                "perturbation_amplitude", "perturbation_mode", "random_loading", "seed", "out_dir"},
               "generate config");

    SimConfig base = parse_sim_config(cfg);
    if (ov.seed.has_value()) {
        base.rng_seed = *ov.seed;
    }
    const std::vector<double> velocities = require_number_list(cfg, "velocities");
    if (velocities.empty()) {
        throw ConfigError("velocities must be a non-empty list");
    }
    const int samples = require_int(cfg, "samples");
    const fs::path out_dir = resolve_out_dir(cfg, ov.out_dir);

    SpectralPoissonSolver solver;
    RunOptions options;
    options.record_frames = true;
    std::vector<fs::path> outputs;
    std::vector<std::pair<double, std::vector<Frame>>> runs;
    for (std::size_t r = 0; r < velocities.size(); ++r) {
        SimConfig c = base;
        if (c.scenario == Scenario::two_stream) {
            c.beam_velocity = velocities[r];
        } else {
            c.thermal_velocity = velocities[r];
        }
        c.rng_seed = base.rng_seed + r;
        c.validate();
        RunResult result = run_simulation(c, solver, options);
        const fs::path fp = out_dir / ("frames_run" + std::to_string(r) + ".csv");
        write_frames_csv(fp, result.frames);
        outputs.push_back(fp);
        runs.emplace_back(velocities[r], std::move(result.frames));
    }

    const Dataset data = build_dataset(runs, samples, base.dx(), base.scenario);
    for (const std::string& w : data.warnings) {
        std::cout << "warning: " << w << "\n";
    }
    const fs::path dataset_path = out_dir / "dataset.csv";
    write_dataset_csv(dataset_path, data);
    outputs.push_back(dataset_path);

    json resolved = echo_sim_config(base);
    resolved["velocities"] = velocities;
    resolved["samples"] = samples;
    resolved["out_dir"] = out_dir.string();
    write_manifest(out_dir, "generate", resolved, {}, outputs);

    std::cout << "generate: " << data.samples.size() << " samples from " << velocities.size() << " runs -> "
              << out_dir.string() << "\n";
    return 0;
}

// ----------------------------------------------------------------- train

int cmd_train(const fs::path& config_path, const Overrides& ov) {
    const json cfg = load_config_file(config_path);
    check_keys(cfg,
               {"dataset", "model", "width", "ansatz", "nl", "loss", "lambda", "nd", "lr", "epochs", "workers",
                "local_step", "residual_convention", "seed", "out_dir"},
               "train config");

    const fs::path dataset_path = require_string(cfg, "dataset");
    const Dataset data = read_dataset_csv(dataset_path);

    ModelSpec spec;
    spec.kind = model_kind_from_name(require_string(cfg, "model"));
    spec.width = get_int(cfg, "width", 64);
    if (spec.kind == ModelKind::cqc) {
        spec.ansatz.kind = ansatz_from_name(get_string(cfg, "ansatz", "strongly_entangling"));
        spec.ansatz.n_layers = get_int(cfg, "nl", 6);
        spec.ansatz.n_qubits = log2_exact(spec.width);
    } else if (cfg.contains("ansatz") || cfg.contains("nl")) {
        throw ConfigError("'ansatz' and 'nl' apply only to model cqc");
    }
    spec.validate();

    TrainConfig tc;
    tc.loss = loss_kind_from_name(get_string(cfg, "loss", "data"));
    tc.lambda = get_number(cfg, "lambda", 0.0);
    tc.n_data_points = get_int(cfg, "nd", spec.width);
    if (cfg.contains("nd") && tc.n_data_points > spec.width) {
        throw ConfigError("config key 'nd' (" + std::to_string(tc.n_data_points) + ") exceeds the grid width (" +
                          std::to_string(spec.width) + ")");
    }
    tc.learning_rate = get_number(cfg, "lr", 1e-3);
    tc.epochs = require_int(cfg, "epochs");
    tc.workers = ov.workers.has_value() ? *ov.workers : get_int(cfg, "workers", 1);
    tc.local_step = get_bool(cfg, "local_step", false);
    tc.residual_convention = residual_from_name(get_string(cfg, "residual_convention", "physical"));
    tc.seed = ov.seed.has_value() ? *ov.seed : get_seed(cfg, "seed", 1);
    const fs::path out_dir = resolve_out_dir(cfg, ov.out_dir);

    const auto t0 = std::chrono::steady_clock::now();
    const TrainResult result = train_parallel(spec, data, tc);
    const auto t1 = std::chrono::steady_clock::now();
    const double wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();

    std::vector<fs::path> outputs;
    const fs::path ckpt_path = out_dir / "model.ckpt";
    Checkpoint ckpt;
    ckpt.spec = spec;
    ckpt.seed = tc.seed;
    ckpt.params = result.params;
    save_checkpoint(ckpt_path, ckpt);
    outputs.push_back(ckpt_path);

    CsvTable history;
    history.header = {"epoch", "loss"};
    for (std::size_t e = 0; e < result.loss_history.size(); ++e) {
        history.rows.push_back({static_cast<double>(e + 1), result.loss_history[e]});
    }
    const fs::path history_path = out_dir / "loss_history.csv";
    write_csv(history_path, history);
    outputs.push_back(history_path);

    // Per-epoch timing log, listed in the manifest as volatile.
    CsvTable log;
    log.header = {"epoch", "loss", "wall_ms"};
    for (std::size_t e = 0; e < result.loss_history.size(); ++e) {
        log.rows.push_back({static_cast<double>(e + 1), result.loss_history[e], result.epoch_wall_ms[e]});
    }
    const fs::path log_path = out_dir / "train_log.csv";
    write_csv(log_path, log);

    json resolved;
    resolved["dataset"] = dataset_path.string();
    resolved["model"] = model_kind_name(spec.kind);
    resolved["width"] = spec.width;
    if (spec.kind == ModelKind::cqc) {
        resolved["ansatz"] = ansatz_name(spec.ansatz.kind);
        resolved["nl"] = spec.ansatz.n_layers;
    }
    resolved["loss"] = loss_kind_name(tc.loss);
    resolved["lambda"] = tc.lambda;
    resolved["nd"] = tc.n_data_points;
    resolved["lr"] = tc.learning_rate;
    resolved["epochs"] = tc.epochs;
    resolved["workers"] = tc.workers;
    resolved["local_step"] = tc.local_step;
    resolved["residual_convention"] = residual_name(tc.residual_convention);
    resolved["seed"] = tc.seed;
    resolved["out_dir"] = out_dir.string();
    write_manifest(out_dir, "train", resolved, {dataset_path}, outputs, {log_path});

    std::cout << "train: " << result.params.size() << " parameters, " << tc.epochs << " epochs";
    if (!result.loss_history.empty()) {
        std::cout << ", final loss " << format_double(result.loss_history.back());
    }
    std::cout << " (" << wall_ms << " ms)\n";
    return 0;
}

// -------------------------------------------------------------- simulate

int cmd_simulate(const fs::path& config_path, const Overrides& ov) {
    const json cfg = load_config_file(config_path);
    check_keys(cfg,
               {"scenario", "v0", "vth", "n_cells", "particles_per_cell", "dt", "steps", "domain_length",
                "perturbation_amplitude", "perturbation_mode", "random_loading", "seed", "solver", "rescale",
                "calibration_dataset", "calibration_scale", "pair_baseline", "record_frames", "snapshot_stride",
                "out_dir"},
               "simulate config");

    SimConfig c = parse_sim_config(cfg);
    c.beam_velocity = get_number(cfg, "v0", 0.0);
    c.thermal_velocity = get_number(cfg, "vth", 0.0);
    if (ov.seed.has_value()) {
        c.rng_seed = *ov.seed;
    }
    c.validate();

    const std::string solver_str = get_string(cfg, "solver", "baseline");
    const bool paired = get_bool(cfg, "pair_baseline", false) || ov.pair_baseline;
    RunOptions options;
    options.record_frames = get_bool(cfg, "record_frames", false);
    options.snapshot_stride = get_int(cfg, "snapshot_stride", 0);
    const fs::path out_dir = resolve_out_dir(cfg, ov.out_dir);

    json resolved = echo_sim_config(c);
    resolved["v0"] = c.beam_velocity;
    resolved["vth"] = c.thermal_velocity;
    resolved["solver"] = solver_str;
    resolved["pair_baseline"] = paired;
    resolved["record_frames"] = options.record_frames;
    resolved["snapshot_stride"] = options.snapshot_stride;
    resolved["out_dir"] = out_dir.string();

    std::vector<fs::path> inputs;
    std::vector<fs::path> outputs;

    if (solver_str == "baseline") {
        if (paired) {
            throw ConfigError("pair_baseline requires a model solver (solver = \"model:<checkpoint>\")");
        }
        SpectralPoissonSolver solver;
        const RunResult run = run_simulation(c, solver, options);
        write_run_artifacts(out_dir, "", run, options, outputs);
        write_manifest(out_dir, "simulate", resolved, inputs, outputs);
        const DiagnosticsRow& last = run.diagnostics.rows.back();
        std::cout << "simulate(baseline): " << run.diagnostics.rows.size() << " steps, total energy "
                  << format_double(last.total) << ", max|E| " << format_double(last.max_abs_E) << "\n";
        return 0;
    }

    const std::string model_prefix = "model:";
    if (solver_str.rfind(model_prefix, 0) != 0) {
        throw ConfigError("unknown solver '" + solver_str + "'; use \"baseline\" or \"model:<checkpoint path>\"");
    }
    const fs::path ckpt_path = solver_str.substr(model_prefix.size());
    const Checkpoint ckpt = load_checkpoint(ckpt_path);
    inputs.push_back(ckpt_path);

    const RescaleMode mode = rescale_mode_from_name(get_string(cfg, "rescale", "calibrated"));
    resolved["rescale"] = rescale_mode_name(mode);
    double calibrated_scale = 0.0;
    if (mode == RescaleMode::calibrated) {
        const bool has_scale = cfg.contains("calibration_scale");
        const bool has_dataset = cfg.contains("calibration_dataset");
        if (has_scale == has_dataset) {
            throw ConfigError("calibrated rescale needs exactly one of 'calibration_scale' or 'calibration_dataset'");
        }
        if (has_scale) {
            calibrated_scale = get_number(cfg, "calibration_scale", 0.0);
        } else {
            const fs::path cal_path = require_string(cfg, "calibration_dataset");
            calibrated_scale = calibrate_scale(read_dataset_csv(cal_path));
            inputs.push_back(cal_path);
            resolved["calibration_dataset"] = cal_path.string();
        }
        resolved["calibration_scale"] = calibrated_scale;
    }

    SurrogateSolver surrogate = SurrogateSolver::from_checkpoint(ckpt, mode, calibrated_scale);
    const HybridResult result = run_hybrid(c, surrogate, paired, options);
    write_run_artifacts(out_dir, "", result.hybrid, options, outputs);

    if (paired) {
        write_run_artifacts(out_dir, "baseline_", *result.baseline, options, outputs);
        CsvTable cmp;
        cmp.header = {"step", "mrae_E", "baseline_max_E", "hybrid_max_E"};
        for (const PairedStepStats& row : result.comparison) {
            cmp.rows.push_back(
                {static_cast<double>(row.step), row.mrae_E, row.baseline_max_E, row.hybrid_max_E});
        }
        const fs::path cmp_path = out_dir / "comparison.csv";
        write_csv(cmp_path, cmp);
        outputs.push_back(cmp_path);
    }

    write_manifest(out_dir, "simulate", resolved, inputs, outputs);
    const DiagnosticsRow& last = result.hybrid.diagnostics.rows.back();
    std::cout << "simulate(" << surrogate.name() << "): " << result.hybrid.diagnostics.rows.size()
              << " steps, total energy " << format_double(last.total) << ", max|E| " << format_double(last.max_abs_E)
              << "\n";
    return 0;
}

// -------------------------------------------------------------- evaluate

struct LabeledSeries {
    std::string label;
    fs::path path;
    std::vector<double> values;
};

void check_label(const std::string& label) {
    if (label.empty()) {
        throw ConfigError("labels must not be empty");
    }
    for (char ch : label) {
        const bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') || (ch >= '0' && ch <= '9') ||
                        ch == '_' || ch == '-' || ch == '.';
        if (!ok) {
            throw ConfigError("label '" + label + "' may use only letters, digits, '_', '-', '.'");
        }
    }
}

std::vector<double> read_column(const fs::path& path, const std::string& column) {
    const CsvTable table = read_csv(path);
    for (std::size_t i = 0; i < table.header.size(); ++i) {
        if (table.header[i] == column) {
            std::vector<double> out;
            out.reserve(table.rows.size());
            for (const std::vector<double>& row : table.rows) {
                out.push_back(row[i]);
            }
            if (out.empty()) {
                throw ConfigError(path.string() + " has no data rows");
            }
            return out;
        }
    }
    throw ConfigError(path.string() + " has no column named '" + column + "'");
}

int cmd_evaluate(const fs::path& config_path, const Overrides& ov) {
    const json cfg = load_config_file(config_path);
    check_keys(cfg, {"series", "phase_space", "hist_bins", "hist_range", "out_dir"}, "evaluate config");

    std::vector<LabeledSeries> series;
    if (cfg.contains("series")) {
        if (!cfg.at("series").is_array()) {
            bad_key("series", "a list of {label, path, column} objects");
        }
        for (const json& entry : cfg.at("series")) {
            check_keys(entry, {"label", "path", "column"}, "series entry");
            LabeledSeries s;
            s.label = require_string(entry, "label");
            check_label(s.label);
            s.path = require_string(entry, "path");
            s.values = read_column(s.path, get_string(entry, "column", "mrae_E"));
            series.push_back(std::move(s));
        }
    }

    std::vector<LabeledSeries> phase;
    if (cfg.contains("phase_space")) {
        if (!cfg.at("phase_space").is_array()) {
            bad_key("phase_space", "a list of {label, path} objects");
        }
        for (const json& entry : cfg.at("phase_space")) {
            check_keys(entry, {"label", "path"}, "phase_space entry");
            LabeledSeries s;
            s.label = require_string(entry, "label");
            check_label(s.label);
            s.path = require_string(entry, "path");
            s.values = read_phase_space_csv(s.path).v;
            phase.push_back(std::move(s));
        }
    }
    if (series.empty() && phase.empty()) {
        throw ConfigError("evaluate needs at least one 'series' or 'phase_space' entry");
    }
    for (const auto& group : {series, phase}) {
        std::set<std::string> seen;
        for (const LabeledSeries& s : group) {
            if (!seen.insert(s.label).second) {
                throw ConfigError("duplicate label '" + s.label + "'");
            }
        }
    }

    const int hist_bins = get_int(cfg, "hist_bins", 50);
    std::optional<std::pair<double, double>> hist_range;
    if (cfg.contains("hist_range")) {
        const std::vector<double> r = require_number_list(cfg, "hist_range");
        if (r.size() != 2) {
            bad_key("hist_range", "a [lo, hi] pair");
        }
        hist_range = {r[0], r[1]};
    }
    const fs::path out_dir = resolve_out_dir(cfg, ov.out_dir);

    std::vector<fs::path> inputs;
    for (const LabeledSeries& s : series) {
        inputs.push_back(s.path);
    }
    for (const LabeledSeries& s : phase) {
        inputs.push_back(s.path);
    }
    std::vector<fs::path> outputs;
    std::ostringstream report;
    report << "qpic " << kVersion << " evaluate\n";
    report << "mrae definition: sum|pred - true| / sum|true| per step, aggregated over the grid\n";

    // Per-series box summary.
    if (!series.empty()) {
        std::ostringstream summary;
        summary << "label,count,median,q1,q3,whisker_lo,whisker_hi,n_outliers\n";
        for (const LabeledSeries& s : series) {
            const BoxStats box = summarize_errors(s.values);
            summary << s.label << "," << s.values.size() << "," << format_double(box.median) << ","
                    << format_double(box.q1) << "," << format_double(box.q3) << "," << format_double(box.whisker_lo)
                    << "," << format_double(box.whisker_hi) << "," << box.outliers.size() << "\n";
            report << "series " << s.label << ": n=" << s.values.size() << " median=" << format_double(box.median)
                   << " q1=" << format_double(box.q1) << " q3=" << format_double(box.q3) << "\n";
        }
        const fs::path p = out_dir / "summary.csv";
        write_text_file(p, summary.str());
        outputs.push_back(p);
    }

    // Pairwise tests between series. Identical series are reported as
    // maximally insignificant instead of running a zero-sample test.
    if (series.size() >= 2) {
        std::ostringstream pairs;
        pairs << "label_a,label_b,n_used,wilcoxon_statistic,p_value,energy_distance\n";
        for (std::size_t a = 0; a < series.size(); ++a) {
            for (std::size_t b = a + 1; b < series.size(); ++b) {
                if (series[a].values.size() != series[b].values.size()) {
                    throw ConfigError("series '" + series[a].label + "' and '" + series[b].label +
                                      "' differ in length; paired tests need step-aligned runs");
                }
                std::vector<double> diffs(series[a].values.size());
                bool all_zero = true;
                for (std::size_t i = 0; i < diffs.size(); ++i) {
                    diffs[i] = series[a].values[i] - series[b].values[i];
                    all_zero = all_zero && diffs[i] == 0.0;
                }
                WilcoxonResult w;
                if (all_zero) {
                    w.statistic = 0.0;
                    w.p_value = 1.0;
                    w.n_used = 0;
                } else {
                    w = wilcoxon_signed_rank(diffs);
                }
                const double dist = energy_distance(series[a].values, series[b].values);
                pairs << series[a].label << "," << series[b].label << "," << w.n_used << ","
                      << format_double(w.statistic) << "," << format_double(w.p_value) << "," << format_double(dist)
                      << "\n";
                report << "pair " << series[a].label << " vs " << series[b].label << ": p="
                       << format_double(w.p_value) << " energy_distance=" << format_double(dist) << "\n";
            }
        }
        const fs::path p = out_dir / "pairs.csv";
        write_text_file(p, pairs.str());
        outputs.push_back(p);
    }

    // Velocity histograms and pairwise distribution distances.
    if (!phase.empty()) {
        double lo;
        double hi;
        if (hist_range.has_value()) {
            lo = hist_range->first;
            hi = hist_range->second;
        } else {
            double vmax = 0.0;
            for (const LabeledSeries& s : phase) {
                for (double v : s.values) {
                    vmax = std::max(vmax, std::abs(v));
                }
            }
            if (vmax == 0.0) {
                vmax = 1.0;
            }
            lo = -1.05 * vmax;
            hi = 1.05 * vmax;
        }
        for (const LabeledSeries& s : phase) {
            const Histogram h = velocity_histogram(s.values, hist_bins, lo, hi);
            CsvTable t;
            t.header = {"bin_lo", "bin_hi", "count", "density"};
            for (std::size_t b = 0; b < h.counts.size(); ++b) {
                t.rows.push_back({h.edges[b], h.edges[b + 1], static_cast<double>(h.counts[b]), h.density[b]});
            }
            const fs::path p = out_dir / ("velocity_hist_" + s.label + ".csv");
            write_csv(p, t);
            outputs.push_back(p);
        }
        if (phase.size() >= 2) {
            std::ostringstream vp;
            vp << "label_a,label_b,energy_distance\n";
            for (std::size_t a = 0; a < phase.size(); ++a) {
                for (std::size_t b = a + 1; b < phase.size(); ++b) {
                    const double dist = energy_distance(phase[a].values, phase[b].values);
                    vp << phase[a].label << "," << phase[b].label << "," << format_double(dist) << "\n";
                    report << "velocity " << phase[a].label << " vs " << phase[b].label
                           << ": energy_distance=" << format_double(dist) << "\n";
                }
            }
            const fs::path p = out_dir / "velocity_pairs.csv";
            write_text_file(p, vp.str());
            outputs.push_back(p);
        }
    }

    const fs::path report_path = out_dir / "report.txt";
    write_text_file(report_path, report.str());
    outputs.push_back(report_path);

    json resolved;
    json jseries = json::array();
    for (const LabeledSeries& s : series) {
        jseries.push_back({{"label", s.label}, {"path", s.path.string()}});
    }
    resolved["series"] = jseries;
    json jphase = json::array();
    for (const LabeledSeries& s : phase) {
        jphase.push_back({{"label", s.label}, {"path", s.path.string()}});
    }
    resolved["phase_space"] = jphase;
    resolved["hist_bins"] = hist_bins;
    if (hist_range.has_value()) {
        resolved["hist_range"] = {hist_range->first, hist_range->second};
    }
    resolved["out_dir"] = out_dir.string();
    write_manifest(out_dir, "evaluate", resolved, inputs, outputs);

    std::cout << "evaluate: " << series.size() << " series, " << phase.size() << " velocity samples -> "
              << out_dir.string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qpic: classical and hybrid quantum-classical 1D particle-in-cell workbench"};
    app.set_version_flag("--version", std::string("qpic ") + kVersion);
    app.require_subcommand(1);

    struct SubArgs {
        std::string config;
        std::string out_dir;
        std::uint64_t seed = 0;
        int workers = 0;
        CLI::Option* out_opt = nullptr;
        CLI::Option* seed_opt = nullptr;
        CLI::Option* workers_opt = nullptr;
    };
    SubArgs gen;
    SubArgs trn;
    SubArgs sim;
    SubArgs evl;
    bool pair_flag = false;

    CLI::App* c_gen = app.add_subcommand("generate", "run seeded PIC simulations and assemble a training set");
    c_gen->add_option("-c,--config", gen.config, "JSON config file")->required();
    gen.out_opt = c_gen->add_option("--out-dir", gen.out_dir, "override the config's out_dir");
    gen.seed_opt = c_gen->add_option("--seed", gen.seed, "override the config's seed");

    CLI::App* c_trn = app.add_subcommand("train", "train a surrogate on a generated dataset");
    c_trn->add_option("-c,--config", trn.config, "JSON config file")->required();
    trn.out_opt = c_trn->add_option("--out-dir", trn.out_dir, "override the config's out_dir");
    trn.seed_opt = c_trn->add_option("--seed", trn.seed, "override the config's seed");
    trn.workers_opt = c_trn->add_option("--workers", trn.workers, "override the config's worker count");

    CLI::App* c_sim = app.add_subcommand("simulate", "run a baseline or surrogate-driven simulation");
    c_sim->add_option("-c,--config", sim.config, "JSON config file")->required();
    sim.out_opt = c_sim->add_option("--out-dir", sim.out_dir, "override the config's out_dir");
    sim.seed_opt = c_sim->add_option("--seed", sim.seed, "override the config's seed");
    c_sim->add_flag("--pair-baseline", pair_flag, "run an exact twin and record per-step field errors");

    CLI::App* c_evl = app.add_subcommand("evaluate", "summarize error series and velocity distributions");
    c_evl->add_option("-c,--config", evl.config, "JSON config file")->required();
    evl.out_opt = c_evl->add_option("--out-dir", evl.out_dir, "override the config's out_dir");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    const auto fill = [](const SubArgs& a, bool pair = false) {
        Overrides ov;
        if (a.out_opt != nullptr && a.out_opt->count() > 0) {
            ov.out_dir = a.out_dir;
        }
        if (a.seed_opt != nullptr && a.seed_opt->count() > 0) {
            ov.seed = a.seed;
        }
        if (a.workers_opt != nullptr && a.workers_opt->count() > 0) {
            ov.workers = a.workers;
        }
        ov.pair_baseline = pair;
        return ov;
    };

    try {
        if (c_gen->parsed()) {
            return cmd_generate(gen.config, fill(gen));
        }
        if (c_trn->parsed()) {
            return cmd_train(trn.config, fill(trn));
        }
        if (c_sim->parsed()) {
            return cmd_simulate(sim.config, fill(sim, pair_flag));
        }
        if (c_evl->parsed()) {
            return cmd_evaluate(evl.config, fill(evl));
        }
        std::cerr << app.help();
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
