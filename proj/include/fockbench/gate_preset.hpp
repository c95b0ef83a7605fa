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

#pragma once

#include <set>
#include <string>
#include <vector>

#include "fockbench/devices.hpp"
#include "fockbench/linear_optics.hpp"

namespace fockbench {

/// Polarization qubit on two rails; logical |0> is one photon in `h_mode`.
struct DualRailQubit {
    std::size_t h_mode = 0;
    std::size_t v_mode = 1;
    bool operator==(const DualRailQubit &) const = default;
};

enum class HeraldOutcome { click, no_click, exactly_one };

inline std::string to_string(HeraldOutcome o) {
    switch (o) {
        case HeraldOutcome::click:
            return "click";
        case HeraldOutcome::no_click:
            return "no_click";
        case HeraldOutcome::exactly_one:
            return "exactly_one";
    }
    return "?";
}

inline HeraldOutcome herald_outcome_from_string(const std::string &s) {
    if (s == "click") return HeraldOutcome::click;
    if (s == "no_click") return HeraldOutcome::no_click;
    if (s == "exactly_one") return HeraldOutcome::exactly_one;
    throw ValidationError("unknown herald outcome '" + s + "'");
}

/// Probability that `model` reports `outcome` for n incident photons. A
/// bucket detector cannot distinguish one photon from several, so it reports
/// exactly_one whenever it clicks.
inline double outcome_probability(const DetectorModel &model, HeraldOutcome outcome, int n) {
    return outcome == HeraldOutcome::no_click ? model.no_click(n) : model.click(n);
}

struct AncillaInput {
    std::size_t mode = 0;
    int photons = 1;
    bool operator==(const AncillaInput &) const = default;
};

/// Detector at `mode` whose model is looked up by `role` at run time.
struct HeraldSpec {
    std::size_t mode = 0;
    std::string role = "herald";
    HeraldOutcome outcome = HeraldOutcome::exactly_one;
    bool operator==(const HeraldSpec &) const = default;
};

/// A passive interferometer with its data qubits, ancilla photons and herald
/// pattern. Modes that are neither data rails nor heralded are traced out.
struct GatePreset {
    std::string name;
    int version = 1;
    TransferMatrix transfer = TransferMatrix::identity(1);
    std::vector<DualRailQubit> qubits;
    std::vector<AncillaInput> ancillas;
    std::vector<HeraldSpec> heralds;

    std::size_t mode_count() const { return transfer.mode_count(); }

    std::vector<std::size_t> data_modes() const {
        std::vector<std::size_t> out;
        for (const auto &q : qubits) {
            out.push_back(q.h_mode);
            out.push_back(q.v_mode);
        }
        return out;
    }

    void validate() const {
        const std::size_t m = mode_count();
        std::set<std::size_t> data;
        for (const auto &q : qubits) {
            if (q.h_mode >= m || q.v_mode >= m) throw ValidationError(name + ": qubit rail outside the mode range");
            if (q.h_mode == q.v_mode) throw ValidationError(name + ": qubit rails must be distinct");
            if (!data.insert(q.h_mode).second || !data.insert(q.v_mode).second) {
                throw ValidationError(name + ": qubits share a rail");
            }
        }
        std::set<std::size_t> anc;
        for (const auto &a : ancillas) {
            if (a.mode >= m) throw ValidationError(name + ": ancilla mode outside the mode range");
            if (a.photons < 0) throw ValidationError(name + ": negative ancilla photon number");
            if (data.count(a.mode)) throw ValidationError(name + ": ancilla mode overlaps a data rail");
            if (!anc.insert(a.mode).second) throw ValidationError(name + ": duplicate ancilla mode");
        }
        std::set<std::size_t> her;
        for (const auto &h : heralds) {
            if (h.mode >= m) throw ValidationError(name + ": herald mode outside the mode range");
            if (data.count(h.mode)) throw ValidationError(name + ": herald mode overlaps a data rail");
            if (!her.insert(h.mode).second) throw ValidationError(name + ": duplicate herald mode");
        }
        if (m > kMaxPackedModes) throw ValidationError(name + ": too many modes");
    }
};

/// Copy of `preset` whose output passes through a per-qubit 2x2 unitary on
/// its (h, v) rails. Entry k applies to qubit k; identity where absent.
inline GatePreset with_output_frame(const GatePreset &preset, const std::vector<std::pair<std::size_t, Eigen::Matrix2cd>> &frames) {
    GatePreset out = preset;
    for (const auto &[q, u] : frames) {
        if (q >= preset.qubits.size()) throw ValidationError("with_output_frame: qubit index out of range");
        const auto &qb = preset.qubits[q];
        out.transfer = out.transfer.then(TransferMatrix::two_mode(preset.mode_count(), qb.h_mode, qb.v_mode, u));
    }
    return out;
}

/// Moves preset mode k to mode `mapping[k]` of a register with
/// `mapping.size()` modes.
inline GatePreset relabel(const GatePreset &preset, const std::vector<std::size_t> &mapping) {
    const std::size_t m = preset.mode_count();
    if (mapping.size() != m) throw ValidationError("relabel: mapping must cover every mode");
    std::set<std::size_t> seen(mapping.begin(), mapping.end());
    if (seen.size() != m || *seen.rbegin() >= m) throw ValidationError("relabel: mapping is not a permutation");
    CMatrix t = CMatrix::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    for (std::size_t k = 0; k < m; ++k) {
        for (std::size_t j = 0; j < m; ++j) {
            t(static_cast<Eigen::Index>(mapping[k]), static_cast<Eigen::Index>(mapping[j])) =
                preset.transfer(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j));
        }
    }
    GatePreset out = preset;
    out.transfer = TransferMatrix(std::move(t));
    for (auto &q : out.qubits) q = {mapping[q.h_mode], mapping[q.v_mode]};
    for (auto &a : out.ancillas) a.mode = mapping[a.mode];
    for (auto &h : out.heralds) h.mode = mapping[h.mode];
    return out;
}

}  // namespace fockbench
