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

#ifndef QPIC_CSV_HPP
#define QPIC_CSV_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "qpic/particles.hpp"
#include "qpic/pic.hpp"

namespace qpic {

// Doubles are printed with %.17g so every file round-trips bit-exactly;
// reruns with the same seed must produce byte-identical artifacts.
std::string format_double(double v);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

CsvTable read_csv(const std::filesystem::path& path);
void write_csv(const std::filesystem::path& path, const CsvTable& table);

// step,rho_0..rho_{n-1},phi_0..phi_{n-1}; one row per recorded step.
void write_frames_csv(const std::filesystem::path& path, const std::vector<Frame>& frames);
std::vector<Frame> read_frames_csv(const std::filesystem::path& path);

// step,time,kinetic,field,total,max_abs_E
void write_diagnostics_csv(const std::filesystem::path& path, const DiagnosticsSeries& series);
DiagnosticsSeries read_diagnostics_csv(const std::filesystem::path& path);

// x,v,beam_id
void write_phase_space_csv(const std::filesystem::path& path, const ParticleEnsemble& particles);
ParticleEnsemble read_phase_space_csv(const std::filesystem::path& path);

void write_phase_space_csv(const std::filesystem::path& path, const PhaseSnapshot& snapshot);

// FNV-1a 64-bit over the raw bytes of a file, rendered as 16 hex digits.
// Used by the run manifests to pin artifact contents.
std::string file_hash_hex(const std::filesystem::path& path);

}  // namespace qpic

#endif
