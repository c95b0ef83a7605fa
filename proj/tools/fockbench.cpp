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

#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "fockbench/fockbench.hpp"

namespace fb = fockbench;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitMismatch = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct CommonOptions {
    std::string config_path;
    std::string out_dir;
    int jobs = 0;
};

std::filesystem::path resolve_output(const std::string &configured, const std::string &fallback, const std::string &out_dir) {
    std::filesystem::path p = configured.empty() ? std::filesystem::path(fallback) : std::filesystem::path(configured);
    if (!out_dir.empty() && p.is_relative()) p = std::filesystem::path(out_dir) / p;
    return p;
}

int emit(const fb::Table &table, const fb::SweepConfig &config, const CommonOptions &opt, const std::string &command) {
    const auto csv = resolve_output(config.csv_path, command + ".csv", opt.out_dir);
    const auto json = resolve_output(config.json_path, command + ".json", opt.out_dir);
    fb::write_text(csv, fb::to_csv(table));
    fb::write_text(json, fb::table_json(table, config, command).dump(2) + "\n");
    for (const auto &w : table.warnings) std::cerr << "warning: " << w << "\n";
    std::cout << table.rows.size() << " records -> " << csv.string() << ", " << json.string() << "\n";
    if (const std::size_t failed = table.failed(); failed > 0) {
        std::cerr << failed << " record(s) flagged with numerical errors\n";
        for (std::size_t i = 0; i < table.errors.size(); ++i) {
            if (!table.errors[i].empty()) std::cerr << "  record " << i << ": " << table.errors[i] << "\n";
        }
        return kExitNumerical;
    }
    return kExitOk;
}

int run_reproduce(double epsilon, int fock_dim) {
    fb::FixtureOptions opt;
    opt.spdc_squeeze = epsilon;
    opt.fock_dim = fock_dim;
    int failures = 0;
    for (const auto &e : fb::appendix_fixtures(opt)) {
        std::printf("%-4s %-16s %-8s expected %+.5f%+.5fi  got %+.5f%+.5fi\n", e.pass ? "ok" : "FAIL", e.fixture.c_str(), e.entry.c_str(),
                    e.expected.real(), e.expected.imag(), e.actual.real(), e.actual.imag());
        if (!e.pass) ++failures;
    }
    if (failures > 0) {
        std::printf("%d fixture entr%s differ by more than %.0e\n", failures, failures == 1 ? "y" : "ies", opt.tolerance);
        return kExitMismatch;
    }
    std::printf("all fixtures match\n");
    return kExitOk;
}

void print_thresholds(const fb::Table &t) {
    const auto col = [&](const std::string &name) {
        return static_cast<std::size_t>(std::find(t.columns.begin(), t.columns.end(), name) - t.columns.begin());
    };
    const std::size_t m = col("metric"), eta = col("eta"), p = col("p_hrld"), st = col("status"), g2 = col("g2_threshold");
    std::printf("%-14s %-6s %-8s %-14s %s\n", "metric", "eta", "p_hrld", "status", "g2");
    for (const auto &row : t.rows) {
        std::printf("%-14s %-6s %-8s %-14s %s\n", fb::format_cell(row[m]).c_str(), fb::format_cell(row[eta]).c_str(), fb::format_cell(row[p]).c_str(),
                    fb::format_cell(row[st]).c_str(), fb::format_cell(row[g2]).c_str());
    }
}

int list_presets() {
    std::vector<std::pair<std::string, fb::GatePreset>> presets;
    presets.emplace_back("bell-ppbs", fb::bell_ppbs_preset());
    presets.emplace_back("ghz-ppbs", fb::ghz_ppbs_preset());
    presets.emplace_back("klm_cz", fb::load_bundled_preset("klm_cz"));
    presets.emplace_back("1-klm", fb::klm_bell_preset());
    std::printf("%-10s %-18s %-7s %-6s %-7s %-7s %s\n", "id", "name", "version", "modes", "qubits", "heralds", "checksum");
    for (const auto &[id, p] : presets) {
        std::printf("%-10s %-18s %-7d %-6zu %-7zu %-7zu %s\n", id.c_str(), p.name.c_str(), p.version, p.mode_count(), p.qubits.size(), p.heralds.size(),
                    fb::preset_checksum(p).c_str());
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Photonic device requirement benchmarks for linear-optics circuits"};
    app.set_version_flag("--version", std::string(FOCKBENCH_VERSION));
    app.require_subcommand(1);

    double spdc_epsilon = 0.4;
    int fixture_dim = 0;
    auto *reproduce = app.add_subcommand("reproduce-appendix", "Compare operators against the reference listings");
    reproduce->add_option("--spdc-epsilon", spdc_epsilon, "SPDC squeezing parameter for the source listing")->check(CLI::Range(0.0, 2.6));
    reproduce->add_option("--fock-dim", fixture_dim, "Override every fixture's truncation")->check(CLI::Range(2, 12));

    CommonOptions common;
    auto add_common = [&](CLI::App *sub) {
        sub->add_option("config", common.config_path, "JSON config file")->required();
        sub->add_option("--out-dir", common.out_dir, "Directory for relative output paths");
        sub->add_option("--jobs", common.jobs, "Worker threads (default: FOCKBENCH_JOBS or all cores)")->check(CLI::PositiveNumber);
    };
    auto *sweep = app.add_subcommand("sweep", "Evaluate metrics over a parameter grid");
    add_common(sweep);
    auto *threshold = app.add_subcommand("threshold", "Find g2 thresholds by bisection");
    add_common(threshold);
    auto *curves = app.add_subcommand("source-curves", "Heralded and multiplexed SPDC source curves");
    add_common(curves);
    auto *presets = app.add_subcommand("presets", "Gate preset utilities");
    presets->require_subcommand(1);
    auto *presets_list = presets->add_subcommand("list", "List bundled presets with checksums");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (reproduce->parsed()) return run_reproduce(spdc_epsilon, fixture_dim);
        if (presets_list->parsed()) return list_presets();
        const int jobs = common.jobs > 0 ? common.jobs : fb::default_jobs();
        const fb::SweepConfig config = fb::load_config(common.config_path);
        if (sweep->parsed()) return emit(fb::run_sweep(config, jobs), config, common, "sweep");
        if (threshold->parsed()) {
            fb::Table t = fb::run_thresholds(config, jobs);
            print_thresholds(t);
            return emit(t, config, common, "threshold");
        }
        if (curves->parsed()) return emit(fb::run_source_curves(config, jobs), config, common, "source-curves");
    } catch (const fb::ConfigError &e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const fb::PresetFormatError &e) {
        std::cerr << "preset error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitOk;
}
