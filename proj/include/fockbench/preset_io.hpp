// Copyright 2026 The fockbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Text format for gate presets:
//
//   format 1
//   name <id>
//   version <int>
//   modes <M>
//   qubits <h>:<v> [<h>:<v> ...]
//   ancilla <mode> <photons>            (repeatable)
//   herald <mode> <role> <outcome>      (repeatable)
//   matrix
//   <M rows of M "re,im" pairs>
//
// '#' starts a comment line.

#pragma once

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fockbench/gate_preset.hpp"

namespace fockbench {

class PresetFormatError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

namespace detail {

inline double parse_double(const std::string &s, int line) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw PresetFormatError("line " + std::to_string(line) + ": bad number '" + s + "'");
    }
    return v;
}

inline std::size_t parse_index(const std::string &s, int line) {
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw PresetFormatError("line " + std::to_string(line) + ": bad integer '" + s + "'");
    }
    return v;
}

inline std::string format_double(double v) {
    char buf[40];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

}  // namespace detail

inline GatePreset parse_preset(std::istream &in) {
    GatePreset p;
    std::size_t modes = 0;
    bool have_format = false, have_matrix = false;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key.empty()) continue;
        if (key == "format") {
            std::string v;
            ls >> v;
            if (v != "1") throw PresetFormatError("unsupported preset format '" + v + "'");
            have_format = true;
        } else if (key == "name") {
            ls >> p.name;
        } else if (key == "version") {
            std::string v;
            ls >> v;
            p.version = static_cast<int>(detail::parse_index(v, lineno));
        } else if (key == "modes") {
            std::string v;
            ls >> v;
            modes = detail::parse_index(v, lineno);
            if (modes == 0 || modes > kMaxPackedModes) throw PresetFormatError("mode count out of range");
        } else if (key == "qubits") {
            std::string tok;
            while (ls >> tok) {
                auto colon = tok.find(':');
                if (colon == std::string::npos) throw PresetFormatError("line " + std::to_string(lineno) + ": expected h:v");
                p.qubits.push_back({detail::parse_index(tok.substr(0, colon), lineno), detail::parse_index(tok.substr(colon + 1), lineno)});
            }
        } else if (key == "ancilla") {
            std::string m, n;
            ls >> m >> n;
            p.ancillas.push_back({detail::parse_index(m, lineno), static_cast<int>(detail::parse_index(n, lineno))});
        } else if (key == "herald") {
            std::string m, role, outcome;
            ls >> m >> role >> outcome;
            if (role.empty() || outcome.empty()) throw PresetFormatError("line " + std::to_string(lineno) + ": incomplete herald");
            try {
                p.heralds.push_back({detail::parse_index(m, lineno), role, herald_outcome_from_string(outcome)});
            } catch (const ValidationError &e) {
                throw PresetFormatError("line " + std::to_string(lineno) + ": " + e.what());
            }
        } else if (key == "matrix") {
            if (modes == 0) throw PresetFormatError("matrix before modes");
            const auto m = static_cast<Eigen::Index>(modes);
            CMatrix t(m, m);
            for (Eigen::Index r = 0; r < m; ++r) {
                if (!std::getline(in, line)) throw PresetFormatError("matrix truncated");
                ++lineno;
                std::istringstream rs(line);
                for (Eigen::Index c = 0; c < m; ++c) {
                    std::string tok;
                    if (!(rs >> tok)) throw PresetFormatError("line " + std::to_string(lineno) + ": matrix row too short");
                    auto comma = tok.find(',');
                    if (comma == std::string::npos) throw PresetFormatError("line " + std::to_string(lineno) + ": expected re,im");
                    t(r, c) = Complex(detail::parse_double(tok.substr(0, comma), lineno), detail::parse_double(tok.substr(comma + 1), lineno));
                }
            }
            try {
                p.transfer = TransferMatrix(std::move(t));
            } catch (const ValidationError &e) {
                throw PresetFormatError(std::string("preset matrix: ") + e.what());
            }
            have_matrix = true;
        } else {
            throw PresetFormatError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        }
    }
    if (!have_format) throw PresetFormatError("missing format line");
    if (!have_matrix) throw PresetFormatError("missing matrix");
    if (p.name.empty()) throw PresetFormatError("missing name");
    try {
        p.validate();
    } catch (const ValidationError &e) {
        throw PresetFormatError(e.what());
    }
    return p;
}

inline std::string write_preset(const GatePreset &p) {
    std::ostringstream o;
    o << "format 1\nname " << p.name << "\nversion " << p.version << "\nmodes " << p.mode_count() << "\nqubits";
    for (const auto &q : p.qubits) o << ' ' << q.h_mode << ':' << q.v_mode;
    o << '\n';
    for (const auto &a : p.ancillas) o << "ancilla " << a.mode << ' ' << a.photons << '\n';
    for (const auto &h : p.heralds) o << "herald " << h.mode << ' ' << h.role << ' ' << to_string(h.outcome) << '\n';
    o << "matrix\n";
    const auto m = static_cast<Eigen::Index>(p.mode_count());
    for (Eigen::Index r = 0; r < m; ++r) {
        for (Eigen::Index c = 0; c < m; ++c) {
            if (c) o << ' ';
            o << detail::format_double(p.transfer(r, c).real()) << ',' << detail::format_double(p.transfer(r, c).imag());
        }
        o << '\n';
    }
    return o.str();
}

/// Checksum of the canonical serialization.
inline std::string preset_checksum(const GatePreset &p) { return hex64(fnv1a64(write_preset(p))); }

inline GatePreset load_preset(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) throw PresetFormatError("cannot open preset file " + path.string());
    return parse_preset(in);
}

/// Directory holding the bundled preset files. FOCKBENCH_DATA overrides the
/// compiled-in location.
inline std::filesystem::path data_directory() {
    if (const char *env = std::getenv("FOCKBENCH_DATA"); env && *env) return env;
#ifdef FOCKBENCH_DATA_DIR
    return FOCKBENCH_DATA_DIR;
#else
    return "data";
#endif
}

inline GatePreset load_bundled_preset(const std::string &name) {
    return load_preset(data_directory() / "presets" / (name + ".preset"));
}

}  // namespace fockbench
