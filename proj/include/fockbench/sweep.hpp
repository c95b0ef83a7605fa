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

// Declarative parameter sweeps: JSON configs, grid expansion, a worker pool
// and CSV/JSON emission.

#pragma once

#include <atomic>
#include <charconv>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>
#include <variant>

#include "fockbench/metrics.hpp"
#include "json.hpp"

#ifndef FOCKBENCH_VERSION
#define FOCKBENCH_VERSION "1.0.0"
#endif

namespace fockbench {

using json = nlohmann::ordered_json;

/// Invalid config; `field` names the offending key.
class ConfigError : public std::runtime_error {
   public:
    ConfigError(std::string field, const std::string &message)
        : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
    const std::string &field() const { return field_; }

   private:
    std::string field_;
};

struct TriggerPreset {
    std::string name;
    DetectorModel detector;
    bool operator==(const TriggerPreset &) const = default;
};

inline std::vector<TriggerPreset> default_triggers() {
    return {{"BD", {DetectorKind::bucket, 0.8, 0.0, 1.0}}, {"SPD", {DetectorKind::spd, 0.95, 0.0, 1.0}}};
}

struct SweepConfig {
    CircuitId circuit = CircuitId::klm1;
    int fock_dim = 3;
    std::vector<double> eta{1.0};
    std::vector<double> dark_count{0.0};
    /// Source grid as (P_hrld, g2) pairs, or as (epsilon, omega) when those
    /// are given instead.
    std::vector<double> p_hrld;
    std::vector<double> g2;
    std::vector<double> epsilon;
    std::vector<double> omega;
    std::vector<MetricId> metrics;
    SettingsMode settings_mode = SettingsMode::optimized;
    std::uint64_t seed = 1;
    double g2_max = 1.0;
    // Source curves.
    std::vector<double> squeezing;
    std::vector<int> sources{1};
    std::vector<SwitchScheme> switch_schemes{SwitchScheme::linear};
    std::vector<double> element_transmittance{0.98};
    std::vector<TriggerPreset> triggers = default_triggers();
    double coupling = 1.0;
    std::string csv_path;
    std::string json_path;

    bool operator==(const SweepConfig &) const = default;
};

// ---------------------------------------------------------------------------
// Serialization.

/// Fixed 9-significant-digit, locale-free formatting.
inline std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 9);
    return std::string(buf, ptr);
}


inline json to_json(const DetectorModel &d) {
    return json{{"kind", to_string(d.kind)}, {"efficiency", d.efficiency}, {"dark_count", d.dark_count_prob}, {"time_bin", d.time_bin}};
}

inline json to_json(const SweepConfig &c) {
    json j;
    j["circuit"] = to_string(c.circuit);
    j["fock_dim"] = c.fock_dim;
    j["eta"] = c.eta;
    j["dark_count"] = c.dark_count;
    j["p_hrld"] = c.p_hrld;
    j["g2"] = c.g2;
    j["epsilon"] = c.epsilon;
    j["omega"] = c.omega;
    json metrics = json::array();
    for (auto m : c.metrics) metrics.push_back(to_string(m));
    j["metrics"] = metrics;
    j["settings_mode"] = to_string(c.settings_mode);
    j["seed"] = c.seed;
    j["g2_max"] = c.g2_max;
    j["squeezing"] = c.squeezing;
    j["sources"] = c.sources;
    json schemes = json::array();
    for (auto s : c.switch_schemes) schemes.push_back(to_string(s));
    j["switch_schemes"] = schemes;
    j["element_transmittance"] = c.element_transmittance;
    json triggers = json::array();
    for (const auto &t : c.triggers) {
        json tj = to_json(t.detector);
        tj["name"] = t.name;
        triggers.push_back(tj);
    }
    j["triggers"] = triggers;
    j["coupling"] = c.coupling;
    j["output"] = json{{"csv", c.csv_path}, {"json", c.json_path}};
    return j;
}

namespace detail {

template <typename T>
T get_field(const json &j, const std::string &field) {
    try {
        return j.get<T>();
    } catch (const json::exception &) {
        throw ConfigError(field, "has the wrong type");
    }
}

inline std::vector<double> get_doubles(const json &j, const std::string &field) {
    if (!j.is_array()) throw ConfigError(field, "must be an array of numbers");
    std::vector<double> out;
    for (const auto &v : j) {
        if (!v.is_number()) throw ConfigError(field, "must be an array of numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

inline void check_range(const std::vector<double> &v, const std::string &field, double lo, double hi, bool lo_open = false) {
    for (double x : v) {
        if (!std::isfinite(x) || x > hi || (lo_open ? x <= lo : x < lo)) {
            throw ConfigError(field, "value " + format_number(x) + " outside " + (lo_open ? "(" : "[") + format_number(lo) + ", " +
                                         format_number(hi) + "]");
        }
    }
}

}  // namespace detail

inline DetectorModel detector_from_json(const json &j, const std::string &field) {
    if (!j.is_object()) throw ConfigError(field, "must be an object");
    DetectorModel d;
    for (const auto &[key, v] : j.items()) {
        const std::string f = field + "." + key;
        if (key == "kind") {
            try {
                d.kind = detector_kind_from_string(detail::get_field<std::string>(v, f));
            } catch (const ValidationError &e) {
                throw ConfigError(f, e.what());
            }
        } else if (key == "efficiency") {
            d.efficiency = detail::get_field<double>(v, f);
        } else if (key == "dark_count") {
            d.dark_count_prob = detail::get_field<double>(v, f);
        } else if (key == "time_bin") {
            d.time_bin = detail::get_field<double>(v, f);
        } else if (key != "name") {
            throw ConfigError(f, "unknown key");
        }
    }
    try {
        d.validate();
    } catch (const ValidationError &e) {
        throw ConfigError(field, e.what());
    }
    return d;
}

/// Checks grid and range constraints; throws ConfigError naming the field.
inline void validate(const SweepConfig &c) {
    if (c.fock_dim < 3 || c.fock_dim > 6) throw ConfigError("fock_dim", "must lie in [3, 6]");
    if (c.eta.empty()) throw ConfigError("eta", "grid must not be empty");
    detail::check_range(c.eta, "eta", 0.0, 1.0);
    if (c.dark_count.empty()) throw ConfigError("dark_count", "grid must not be empty");
    detail::check_range(c.dark_count, "dark_count", 0.0, 0.5);
    detail::check_range(c.p_hrld, "p_hrld", 0.0, 1.0, true);
    detail::check_range(c.g2, "g2", 0.0, 2.0);
    detail::check_range(c.epsilon, "epsilon", 0.0, 1.0);
    detail::check_range(c.omega, "omega", 0.0, 1.0);
    if (!c.epsilon.empty() || !c.omega.empty()) {
        if (!c.p_hrld.empty() || !c.g2.empty()) throw ConfigError("epsilon", "give either p_hrld/g2 or epsilon/omega, not both");
    }
    if (!(c.g2_max > 0.0 && c.g2_max <= 2.0)) throw ConfigError("g2_max", "must lie in (0, 2]");
    for (auto m : c.metrics) {
        if (!metric_applies(m, c.circuit)) throw ConfigError("metrics", to_string(m) + " does not apply to " + to_string(c.circuit));
        if (m == MetricId::ch && is_post_selected(c.circuit)) throw ConfigError("metrics", "ch needs a heralded circuit");
    }
    detail::check_range(c.squeezing, "squeezing", 0.0, std::atanh(0.99));
    for (int s : c.sources) {
        if (s < 1 || s > 4096) throw ConfigError("sources", "source counts must lie in [1, 4096]");
    }
    detail::check_range(c.element_transmittance, "element_transmittance", 0.0, 1.0, true);
    if (!(c.coupling > 0.0 && c.coupling <= 1.0)) throw ConfigError("coupling", "must lie in (0, 1]");
}

inline SweepConfig config_from_json(const json &j) {
    if (!j.is_object()) throw ConfigError("<root>", "config must be a JSON object");
    SweepConfig c;
    for (const auto &[key, v] : j.items()) {
        if (key == "circuit") {
            try {
                c.circuit = circuit_from_string(detail::get_field<std::string>(v, key));
            } catch (const ValidationError &e) {
                throw ConfigError(key, e.what());
            }
        } else if (key == "fock_dim") {
            if (!v.is_number_integer()) throw ConfigError(key, "must be an integer");
            c.fock_dim = v.get<int>();
        } else if (key == "eta") {
            c.eta = detail::get_doubles(v, key);
        } else if (key == "dark_count") {
            c.dark_count = detail::get_doubles(v, key);
        } else if (key == "p_hrld") {
            c.p_hrld = detail::get_doubles(v, key);
        } else if (key == "g2") {
            c.g2 = detail::get_doubles(v, key);
        } else if (key == "epsilon") {
            c.epsilon = detail::get_doubles(v, key);
        } else if (key == "omega") {
            c.omega = detail::get_doubles(v, key);
        } else if (key == "metrics") {
            if (!v.is_array()) throw ConfigError(key, "must be an array of metric names");
            if (v.empty()) throw ConfigError(key, "list must not be empty");
            c.metrics.clear();
            for (const auto &m : v) {
                try {
                    c.metrics.push_back(metric_from_string(detail::get_field<std::string>(m, key)));
                } catch (const ValidationError &e) {
                    throw ConfigError(key, e.what());
                }
            }
        } else if (key == "settings_mode") {
            try {
                c.settings_mode = settings_mode_from_string(detail::get_field<std::string>(v, key));
            } catch (const ValidationError &e) {
                throw ConfigError(key, e.what());
            }
        } else if (key == "seed") {
            if (!v.is_number_unsigned()) throw ConfigError(key, "must be a non-negative integer");
            c.seed = v.get<std::uint64_t>();
        } else if (key == "g2_max") {
            c.g2_max = detail::get_field<double>(v, key);
        } else if (key == "squeezing") {
            c.squeezing = detail::get_doubles(v, key);
        } else if (key == "sources") {
            if (!v.is_array()) throw ConfigError(key, "must be an array of integers");
            c.sources.clear();
            for (const auto &s : v) {
                if (!s.is_number_integer()) throw ConfigError(key, "must be an array of integers");
                c.sources.push_back(s.get<int>());
            }
        } else if (key == "switch_schemes") {
            if (!v.is_array()) throw ConfigError(key, "must be an array of scheme names");
            c.switch_schemes.clear();
            for (const auto &s : v) {
                try {
                    c.switch_schemes.push_back(switch_scheme_from_string(detail::get_field<std::string>(s, key)));
                } catch (const ValidationError &e) {
                    throw ConfigError(key, e.what());
                }
            }
        } else if (key == "element_transmittance") {
            c.element_transmittance = detail::get_doubles(v, key);
        } else if (key == "triggers") {
            if (!v.is_array()) throw ConfigError(key, "must be an array of detector objects");
            c.triggers.clear();
            for (std::size_t k = 0; k < v.size(); ++k) {
                const std::string f = key + "[" + std::to_string(k) + "]";
                std::string name = v[k].is_object() && v[k].contains("name") ? detail::get_field<std::string>(v[k]["name"], f + ".name") : "";
                c.triggers.push_back({name, detector_from_json(v[k], f)});
            }
        } else if (key == "coupling") {
            c.coupling = detail::get_field<double>(v, key);
        } else if (key == "output") {
            if (!v.is_object()) throw ConfigError(key, "must be an object with csv and json paths");
            for (const auto &[ok, ov] : v.items()) {
                if (ok == "csv") {
                    c.csv_path = detail::get_field<std::string>(ov, "output.csv");
                } else if (ok == "json") {
                    c.json_path = detail::get_field<std::string>(ov, "output.json");
                } else {
                    throw ConfigError("output." + ok, "unknown key");
                }
            }
        } else {
            throw ConfigError(key, "unknown key");
        }
    }
    validate(c);
    return c;
}

inline SweepConfig load_config(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("<file>", "cannot open " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error &e) {
        throw ConfigError("<file>", std::string("malformed JSON: ") + e.what());
    }
    return config_from_json(j);
}

// ---------------------------------------------------------------------------
// Tables.

using Cell = std::variant<double, std::int64_t, std::string, bool>;

inline std::string format_cell(const Cell &c) {
    return std::visit(
        [](const auto &v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>) {
                return format_number(v);
            } else if constexpr (std::is_same_v<T, std::int64_t>) {
                return std::to_string(v);
            } else if constexpr (std::is_same_v<T, bool>) {
                return v ? "true" : "false";
            } else {
                return v;
            }
        },
        c);
}

inline json cell_json(const Cell &c) {
    return std::visit(
        [](const auto &v) -> json {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>) {
                if (!std::isfinite(v)) return nullptr;
                return v;
            } else {
                return v;
            }
        },
        c);
}

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    /// Per-row wall time in seconds; JSON only, never in the CSV.
    std::vector<double> wall_times;
    /// Empty on success, otherwise the failure message for that row.
    std::vector<std::string> errors;
    std::vector<std::string> warnings;

    std::size_t failed() const {
        return static_cast<std::size_t>(std::count_if(errors.begin(), errors.end(), [](const std::string &e) { return !e.empty(); }));
    }
};

inline std::string quote_csv(const std::string &s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

inline std::string to_csv(const Table &t) {
    std::string out;
    for (std::size_t k = 0; k < t.columns.size(); ++k) out += (k ? "," : "") + t.columns[k];
    out += '\n';
    for (const auto &row : t.rows) {
        for (std::size_t k = 0; k < row.size(); ++k) out += (k ? "," : "") + quote_csv(format_cell(row[k]));
        out += '\n';
    }
    return out;
}

inline json table_json(const Table &t, const SweepConfig &config, const std::string &command) {
    json meta;
    meta["tool"] = "fockbench";
    meta["version"] = FOCKBENCH_VERSION;
    meta["command"] = command;
    meta["seed"] = config.seed;
    meta["settings_mode"] = to_string(config.settings_mode);
    json checksums = json::object();
    try {
        checksums["klm_cz"] = preset_checksum(load_bundled_preset("klm_cz"));
    } catch (const std::exception &) {
        checksums["klm_cz"] = nullptr;
    }
    checksums["bell_ppbs"] = preset_checksum(bell_ppbs_preset());
    checksums["ghz_ppbs"] = preset_checksum(ghz_ppbs_preset());
    meta["preset_checksums"] = checksums;
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    meta["timestamp"] = stamp;
    meta["config"] = to_json(config);
    meta["warnings"] = t.warnings;
    json records = json::array();
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        json rec;
        for (std::size_t k = 0; k < t.columns.size(); ++k) rec[t.columns[k]] = cell_json(t.rows[r][k]);
        rec["wall_time_s"] = r < t.wall_times.size() ? t.wall_times[r] : 0.0;
        if (r < t.errors.size() && !t.errors[r].empty()) rec["error"] = t.errors[r];
        records.push_back(rec);
    }
    return json{{"metadata", meta}, {"records", records}};
}

// ---------------------------------------------------------------------------
// Worker pool.

/// Worker count from FOCKBENCH_JOBS, else the hardware concurrency.
inline int default_jobs() {
    if (const char *env = std::getenv("FOCKBENCH_JOBS"); env && *env) {
        int v = 0;
        auto [ptr, ec] = std::from_chars(env, env + std::strlen(env), v);
        if (ec == std::errc() && v > 0) return v;
    }
    return std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
}

/// Runs body(i) for i in [0, n) on `jobs` threads. Results must be written
/// to per-index slots; completion order is irrelevant.
inline void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)> &body) {
    const auto workers = static_cast<std::size_t>(std::max(1, jobs));
    if (workers == 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < std::min(workers, n); ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) body(i);
        });
    }
    for (auto &t : pool) t.join();
}

// ---------------------------------------------------------------------------
// Runners.

inline constexpr double kLeakWarning = 1e-4;

struct SourcePoint {
    double p_hrld = 0.0;
    double g2 = 0.0;
    double epsilon = 0.0;
    double omega = 0.0;
    std::string error;
};

/// The source grid of a config as explicit points.
inline std::vector<SourcePoint> source_points(const SweepConfig &c) {
    std::vector<SourcePoint> out;
    if (!c.epsilon.empty() || !c.omega.empty()) {
        const auto eps = c.epsilon.empty() ? std::vector<double>{1.0} : c.epsilon;
        const auto om = c.omega.empty() ? std::vector<double>{0.0} : c.omega;
        for (double e : eps) {
            for (double o : om) {
                SourcePoint p{e * e, 0.0, e, o, ""};
                try {
                    p.g2 = SourceSpec{e, o}.g2();
                } catch (const std::exception &ex) {
                    p.g2 = std::numeric_limits<double>::quiet_NaN();
                }
                out.push_back(p);
            }
        }
        return out;
    }
    if (c.p_hrld.empty()) throw ConfigError("p_hrld", "grid must not be empty");
    const auto g2s = c.g2.empty() ? std::vector<double>{0.0} : c.g2;
    for (double p : c.p_hrld) {
        for (double g : g2s) {
            SourcePoint sp{p, g, std::nan(""), std::nan(""), ""};
            try {
                SourceSpec s = source_from_targets(p, g);
                sp.epsilon = s.epsilon;
                sp.omega = s.omega;
            } catch (const std::exception &e) {
                sp.error = e.what();
            }
            out.push_back(sp);
        }
    }
    return out;
}

/// Every (eta, dark_count, source point) with herald probability, leaked
/// population and each metric's value and violation flag.
inline Table run_sweep(const SweepConfig &c, int jobs) {
    validate(c);
    if (c.metrics.empty()) throw ConfigError("metrics", "list must not be empty");
    const auto points = source_points(c);
    struct Point {
        double eta, dark;
        SourcePoint src;
    };
    std::vector<Point> grid;
    for (double eta : c.eta) {
        for (double d : c.dark_count) {
            for (const auto &s : points) grid.push_back({eta, d, s});
        }
    }
    Table t;
    t.columns = {"index", "circuit", "eta", "dark_count", "p_hrld", "g2", "epsilon", "omega", "herald_prob", "leaked"};
    for (auto m : c.metrics) {
        t.columns.push_back(to_string(m));
        t.columns.push_back(to_string(m) + "_violated");
    }
    t.columns.push_back("status");
    t.rows.resize(grid.size());
    t.wall_times.assign(grid.size(), 0.0);
    t.errors.assign(grid.size(), "");
    std::vector<double> leaks(grid.size(), 0.0);
    parallel_for(grid.size(), jobs, [&](std::size_t i) {
        const auto start = std::chrono::steady_clock::now();
        const Point &p = grid[i];
        std::vector<Cell> row{static_cast<std::int64_t>(i), to_string(c.circuit), p.eta, p.dark, p.src.p_hrld, p.src.g2, p.src.epsilon, p.src.omega};
        std::string error = p.src.error;
        const double nan = std::numeric_limits<double>::quiet_NaN();
        std::vector<Cell> tail;
        if (error.empty()) {
            try {
                const CircuitConditions cond = total_efficiency_conditions(c.circuit, p.eta, p.dark);
                const CircuitOutput out = run_circuit(c.circuit, SourceSpec{p.src.epsilon, p.src.omega}, cond.devices, c.fock_dim, cond.options);
                leaks[i] = out.leaked;
                tail = {out.herald_prob, out.leaked};
                for (auto m : c.metrics) {
                    MetricResult r = evaluate_metric(m, out, cond.devices, c.settings_mode, c.seed);
                    tail.push_back(r.value);
                    tail.push_back(r.violated);
                }
            } catch (const std::exception &e) {
                error = e.what();
            }
        }
        if (!error.empty()) {
            tail = {nan, nan};
            for (std::size_t k = 0; k < c.metrics.size(); ++k) {
                tail.push_back(nan);
                tail.push_back(false);
            }
        }
        row.insert(row.end(), tail.begin(), tail.end());
        row.push_back(error.empty() ? "ok" : "error");
        t.rows[i] = std::move(row);
        t.errors[i] = error;
        t.wall_times[i] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    });
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (leaks[i] > kLeakWarning) {
            t.warnings.push_back("record " + std::to_string(i) + ": leaked population " + format_number(leaks[i]) +
                                 " exceeds the truncation; raise fock_dim");
        }
    }
    return t;
}

/// threshold_scan for every (eta, dark_count, P_hrld, metric).
inline Table run_thresholds(const SweepConfig &c, int jobs) {
    validate(c);
    if (c.metrics.empty()) throw ConfigError("metrics", "list must not be empty");
    if (c.p_hrld.empty()) throw ConfigError("p_hrld", "grid must not be empty");
    struct Point {
        double eta, dark, p;
        MetricId metric;
    };
    std::vector<Point> grid;
    for (double eta : c.eta) {
        for (double d : c.dark_count) {
            for (double p : c.p_hrld) {
                for (auto m : c.metrics) grid.push_back({eta, d, p, m});
            }
        }
    }
    Table t;
    t.columns = {"index", "circuit", "metric", "eta", "dark_count", "p_hrld", "status", "g2_threshold", "omega_threshold",
                 "omega_violating", "omega_failing", "margin_violating", "margin_failing", "evaluations", "monotone", "settings"};
    t.rows.resize(grid.size());
    t.wall_times.assign(grid.size(), 0.0);
    t.errors.assign(grid.size(), "");
    ThresholdScanOptions opt;
    opt.g2_max = c.g2_max;
    parallel_for(grid.size(), jobs, [&](std::size_t i) {
        const auto start = std::chrono::steady_clock::now();
        const Point &p = grid[i];
        std::vector<Cell> row{static_cast<std::int64_t>(i), to_string(c.circuit), to_string(p.metric), p.eta, p.dark, p.p};
        const double nan = std::numeric_limits<double>::quiet_NaN();
        try {
            ThresholdResult r = circuit_threshold(c.circuit, p.metric, p.p, total_efficiency_conditions(c.circuit, p.eta, p.dark), c.fock_dim,
                                                  c.settings_mode, c.seed, opt);
            std::string settings;
            if (r.settings) {
                for (std::size_t k = 0; k < r.settings->analyzers.size(); ++k) {
                    settings += (k ? " " : "") + format_number(r.settings->analyzers[k].theta) + "/" + format_number(r.settings->analyzers[k].phi);
                }
            }
            const bool found = r.status == ThresholdStatus::found;
            row.insert(row.end(), {to_string(r.status), r.g2, r.omega, found ? r.lower.omega : nan, found ? r.upper.omega : nan,
                                   found ? r.lower.margin : nan, found ? r.upper.margin : nan, static_cast<std::int64_t>(r.evaluations.size()),
                                   r.monotone, settings});
        } catch (const std::exception &e) {
            t.errors[i] = e.what();
            row.insert(row.end(), {std::string("error"), nan, nan, nan, nan, nan, nan, std::int64_t{0}, false, std::string()});
        }
        t.rows[i] = std::move(row);
        t.wall_times[i] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    });
    return t;
}

/// One point of a heralded-SPDC source curve.
struct SourceCurvePoint {
    double trigger_probability = 0.0;
    double p_hrld = 0.0;
    double g2 = std::numeric_limits<double>::quiet_NaN();
    double single_photon_fraction = 0.0;
    double transmittance = 1.0;
};

/// Heralded SPDC at squeezing `squeeze`, multiplexed over `switch_spec`
/// sources, then attenuated by the switch and by `coupling`.
inline SourceCurvePoint source_curve_point(double squeeze, const DetectorModel &trigger, const SwitchSpec &switch_spec, double coupling,
                                           int fock_dim) {
    SourceCurvePoint pt;
    const PureState pair = spdc_state(SqueezerSpec{squeeze}, FockSpace(fock_dim));
    const HeraldResult h = herald_single(pair, trigger);
    pt.trigger_probability = h.trigger_probability;
    pt.transmittance = switch_loss(switch_spec) * coupling;
    if (!h.heralded) return pt;
    const HeraldedMixture out = attenuate(multiplex(*h.heralded, switch_spec.source_count), pt.transmittance);
    pt.p_hrld = out.herald_probability();
    pt.single_photon_fraction = out.single_photon_fraction();
    if (out.mean_photons() > 0.0) pt.g2 = out.conditional_g2();
    return pt;
}

inline Table run_source_curves(const SweepConfig &c, int jobs) {
    validate(c);
    if (c.squeezing.empty()) throw ConfigError("squeezing", "grid must not be empty");
    if (c.triggers.empty()) throw ConfigError("triggers", "list must not be empty");
    const int dim = std::max(c.fock_dim, 10);
    struct Point {
        std::size_t trigger;
        SwitchScheme scheme;
        int sources;
        double t, squeeze;
    };
    std::vector<Point> grid;
    for (std::size_t tr = 0; tr < c.triggers.size(); ++tr) {
        for (auto sch : c.switch_schemes) {
            for (int s : c.sources) {
                for (double t : c.element_transmittance) {
                    for (double e : c.squeezing) grid.push_back({tr, sch, s, t, e});
                }
            }
        }
    }
    Table t;
    t.columns = {"index",      "trigger",        "trigger_kind", "trigger_efficiency", "scheme", "sources", "element_transmittance",
                 "squeezing",  "p_trigger",      "p_hrld",       "g2",                 "single_photon_fraction", "transmittance"};
    t.rows.resize(grid.size());
    t.wall_times.assign(grid.size(), 0.0);
    t.errors.assign(grid.size(), "");
    parallel_for(grid.size(), jobs, [&](std::size_t i) {
        const auto start = std::chrono::steady_clock::now();
        const Point &p = grid[i];
        const TriggerPreset &tr = c.triggers[p.trigger];
        std::vector<Cell> row{static_cast<std::int64_t>(i), tr.name, to_string(tr.detector.kind), tr.detector.efficiency, to_string(p.scheme),
                              static_cast<std::int64_t>(p.sources), p.t, p.squeeze};
        try {
            SourceCurvePoint pt = source_curve_point(p.squeeze, tr.detector, SwitchSpec{p.scheme, p.t, p.sources}, c.coupling, dim);
            row.insert(row.end(), {pt.trigger_probability, pt.p_hrld, pt.g2, pt.single_photon_fraction, pt.transmittance});
        } catch (const std::exception &e) {
            const double nan = std::numeric_limits<double>::quiet_NaN();
            t.errors[i] = e.what();
            row.insert(row.end(), {nan, nan, nan, nan, nan});
        }
        t.rows[i] = std::move(row);
        t.wall_times[i] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    });
    return t;
}

/// Writes `text` to `path`, creating parent directories.
inline void write_text(const std::filesystem::path &path, const std::string &text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

}  // namespace fockbench
