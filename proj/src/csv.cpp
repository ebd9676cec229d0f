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

#include "qpic/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "qpic/errors.hpp"

namespace qpic {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

std::ofstream open_for_write(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw ConfigError("cannot open '" + path.string() + "' for writing");
    }
    return out;
}

std::ifstream open_for_read(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open '" + path.string() + "' for reading");
    }
    return in;
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) {
        fields.push_back(field);
    }
    if (!line.empty() && line.back() == ',') {
        fields.emplace_back();
    }
    return fields;
}

double parse_double(const std::string& s, const std::filesystem::path& path) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') {
        throw ConfigError("malformed numeric field '" + s + "' in " + path.string());
    }
    return v;
}

}  // namespace

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in = open_for_read(path);
    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) {
        throw ConfigError("empty csv file " + path.string());
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    table.header = split_fields(line);
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        const std::vector<std::string> fields = split_fields(line);
        if (fields.size() != table.header.size()) {
            throw ConfigError("row with " + std::to_string(fields.size()) + " fields, expected " +
                              std::to_string(table.header.size()) + " in " + path.string());
        }
        std::vector<double> row;
        row.reserve(fields.size());
        for (const std::string& f : fields) {
            row.push_back(parse_double(f, path));
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
    std::ofstream out = open_for_write(path);
    for (std::size_t i = 0; i < table.header.size(); ++i) {
        out << (i ? "," : "") << table.header[i];
    }
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            out << (i ? "," : "") << format_double(row[i]);
        }
        out << '\n';
    }
}

void write_frames_csv(const std::filesystem::path& path, const std::vector<Frame>& frames) {
    std::ofstream out = open_for_write(path);
    const std::size_t n = frames.empty() ? 0 : frames.front().rho.size();
    out << "step";
    for (std::size_t i = 0; i < n; ++i) {
        out << ",rho_" << i;
    }
    for (std::size_t i = 0; i < n; ++i) {
        out << ",phi_" << i;
    }
    out << '\n';
    for (const Frame& f : frames) {
        out << f.step;
        for (double v : f.rho) {
            out << ',' << format_double(v);
        }
        for (double v : f.phi) {
            out << ',' << format_double(v);
        }
        out << '\n';
    }
}

std::vector<Frame> read_frames_csv(const std::filesystem::path& path) {
    const CsvTable table = read_csv(path);
    if (table.header.empty() || table.header[0] != "step" || table.header.size() % 2 == 0) {
        throw ConfigError("unexpected frames header in " + path.string());
    }
    const std::size_t n = (table.header.size() - 1) / 2;
    if (n == 0 || table.header[1] != "rho_0" || table.header[1 + n] != "phi_0") {
        throw ConfigError("unexpected frames header in " + path.string());
    }
    std::vector<Frame> frames;
    frames.reserve(table.rows.size());
    for (const auto& row : table.rows) {
        Frame f;
        f.step = static_cast<int>(row[0]);
        f.rho.assign(row.begin() + 1, row.begin() + 1 + n);
        f.phi.assign(row.begin() + 1 + n, row.end());
        frames.push_back(std::move(f));
    }
    return frames;
}

void write_diagnostics_csv(const std::filesystem::path& path, const DiagnosticsSeries& series) {
    std::ofstream out = open_for_write(path);
    out << "step,time,kinetic,field,total,max_abs_E\n";
    for (const DiagnosticsRow& r : series.rows) {
        out << r.step << ',' << format_double(r.time) << ',' << format_double(r.kinetic) << ','
            << format_double(r.field) << ',' << format_double(r.total) << ',' << format_double(r.max_abs_E) << '\n';
    }
}

DiagnosticsSeries read_diagnostics_csv(const std::filesystem::path& path) {
    const CsvTable table = read_csv(path);
    const std::vector<std::string> expected = {"step", "time", "kinetic", "field", "total", "max_abs_E"};
    if (table.header != expected) {
        throw ConfigError("unexpected diagnostics header in " + path.string());
    }
    DiagnosticsSeries series;
    for (const auto& row : table.rows) {
        series.rows.push_back({static_cast<int>(row[0]), row[1], row[2], row[3], row[4], row[5]});
    }
    return series;
}

namespace {

void write_phase_rows(std::ofstream& out, const std::vector<double>& x, const std::vector<double>& v,
                      const std::vector<std::uint8_t>& beam) {
    out << "x,v,beam_id\n";
    for (std::size_t p = 0; p < x.size(); ++p) {
        out << format_double(x[p]) << ',' << format_double(v[p]) << ',' << int(beam[p]) << '\n';
    }
}

}  // namespace

void write_phase_space_csv(const std::filesystem::path& path, const ParticleEnsemble& particles) {
    std::ofstream out = open_for_write(path);
    write_phase_rows(out, particles.x, particles.v, particles.beam);
}

void write_phase_space_csv(const std::filesystem::path& path, const PhaseSnapshot& snapshot) {
    std::ofstream out = open_for_write(path);
    write_phase_rows(out, snapshot.x, snapshot.v, snapshot.beam);
}

ParticleEnsemble read_phase_space_csv(const std::filesystem::path& path) {
    const CsvTable table = read_csv(path);
    const std::vector<std::string> expected = {"x", "v", "beam_id"};
    if (table.header != expected) {
        throw ConfigError("unexpected phase-space header in " + path.string());
    }
    ParticleEnsemble p;
    for (const auto& row : table.rows) {
        p.x.push_back(row[0]);
        p.v.push_back(row[1]);
        p.beam.push_back(static_cast<std::uint8_t>(row[2]));
    }
    if (!p.x.empty()) {
        p.macro_charge = -1.0 / static_cast<double>(p.x.size());
        p.macro_mass = 1.0 / static_cast<double>(p.x.size());
    }
    return p;
}

std::string file_hash_hex(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open '" + path.string() + "' for hashing");
    }
    std::uint64_t h = 14695981039346656037ULL;
    char buf[4096];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        const std::streamsize got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ULL;
        }
    }
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h));
    return hex;
}

}  // namespace qpic
