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

// Gate presets and their simulation.
//
// Simulation never builds the full Fock space of a circuit. Each input
// configuration is pushed through the interferometer exactly (see
// `propagate`); the output is grouped by the occupation of non-data modes,
// weighted by the herald detector response and accumulated into a density
// matrix on the data rails only. Data rails are truncated at the requested
// dimension; the population above it is reported as leaked.

#pragma once

#include <functional>
#include <map>
#include <numbers>
#include <unordered_map>

#include "fockbench/preset_io.hpp"

namespace fockbench {

using DeviceMap = std::map<std::string, DetectorModel>;

inline const DetectorModel &device_for(const DeviceMap &devices, const std::string &role) {
    auto it = devices.find(role);
    if (it == devices.end()) throw ValidationError("no detector model for role '" + role + "'");
    return it->second;
}

// ---------------------------------------------------------------------------
// Presets.

namespace detail {

/// Real rotation [[t, -r], [r, t]] between two modes, r^2 = coupling.
inline TransferMatrix coupler(std::size_t modes, std::size_t a, std::size_t b, double coupling) {
    const double r = std::sqrt(coupling), t = std::sqrt(1.0 - coupling);
    Eigen::Matrix2cd u;
    u << t, -r, r, t;
    return TransferMatrix::two_mode(modes, a, b, u);
}

inline TransferMatrix ppbs_transfer(std::size_t modes, const DualRailQubit &c, const DualRailQubit &t, std::size_t loss_c,
                                    std::size_t loss_t, double reflectivity) {
    return coupler(modes, c.v_mode, t.v_mode, reflectivity)
        .then(coupler(modes, c.h_mode, loss_c, reflectivity))
        .then(coupler(modes, t.h_mode, loss_t, reflectivity));
}

inline std::size_t rails_end(std::initializer_list<DualRailQubit> qs) {
    std::size_t m = 0;
    for (const auto &q : qs) m = std::max({m, q.h_mode + 1, q.v_mode + 1});
    return m;
}

}  // namespace detail

/// Post-selected controlled-Z from a partially polarizing beamsplitter.
/// `reflectivity` is the intensity coupling between the two V rails; the H
/// rails are attenuated by the same amount into two loss modes appended
/// after the data rails. At 2/3 every logical term has amplitude 1/3.
inline GatePreset ppbs_cphase(DualRailQubit control = {0, 1}, DualRailQubit target = {2, 3}, double reflectivity = 2.0 / 3.0) {
    if (!(reflectivity >= 0.0 && reflectivity <= 1.0)) throw ValidationError("ppbs_cphase: reflectivity must lie in [0, 1]");
    const std::size_t data_end = detail::rails_end({control, target});
    const std::size_t m = data_end + 2;
    GatePreset p;
    p.name = "ppbs_cphase";
    p.qubits = {control, target};
    p.transfer = TransferMatrix::identity(m);
    p.validate();
    p.transfer = detail::ppbs_transfer(m, control, target, data_end, data_end + 1, reflectivity);
    return p;
}

/// Two PPBS gates, (q1, q2) then (q2, q3), with four loss modes after the
/// data rails.
inline GatePreset chain_cphase_ghz(DualRailQubit q1 = {0, 1}, DualRailQubit q2 = {2, 3}, DualRailQubit q3 = {4, 5},
                                   double reflectivity = 2.0 / 3.0) {
    const std::size_t data_end = detail::rails_end({q1, q2, q3});
    const std::size_t m = data_end + 4;
    GatePreset p;
    p.name = "chain_cphase_ghz";
    p.qubits = {q1, q2, q3};
    p.transfer = TransferMatrix::identity(m);
    p.validate();
    p.transfer = detail::ppbs_transfer(m, q1, q2, data_end, data_end + 1, reflectivity)
                     .then(detail::ppbs_transfer(m, q2, q3, data_end + 2, data_end + 3, reflectivity));
    return p;
}

/// Heralded controlled-Z loaded from the bundled preset file, with its data
/// rails moved to `control` and `target`.
inline GatePreset klm_cz(DualRailQubit control = {0, 1}, DualRailQubit target = {2, 3}) {
    GatePreset base = load_bundled_preset("klm_cz");
    const std::size_t m = base.mode_count();
    if (base.qubits.size() != 2) throw PresetFormatError("klm_cz preset must declare two qubits");
    std::vector<std::size_t> from{base.qubits[0].h_mode, base.qubits[0].v_mode, base.qubits[1].h_mode, base.qubits[1].v_mode};
    std::vector<std::size_t> to{control.h_mode, control.v_mode, target.h_mode, target.v_mode};
    std::vector<std::size_t> mapping(m, m);
    std::vector<bool> used(m, false);
    for (std::size_t k = 0; k < 4; ++k) {
        if (to[k] >= m || used[to[k]]) throw ValidationError("klm_cz: rails must be distinct modes below " + std::to_string(m));
        mapping[from[k]] = to[k];
        used[to[k]] = true;
    }
    std::size_t next = 0;
    for (std::size_t k = 0; k < m; ++k) {
        if (mapping[k] != m) continue;
        while (used[next]) ++next;
        mapping[k] = next;
        used[next] = true;
    }
    return relabel(base, mapping);
}

// ---------------------------------------------------------------------------
// Sources on dual rails.

/// Binomial thinning of a photon-number distribution by transmittance t.
inline std::vector<double> thin_populations(const std::vector<double> &p, double t) {
    if (!(t >= 0.0 && t <= 1.0)) throw ValidationError("transmittance must lie in [0, 1]");
    std::vector<double> out(p.size(), 0.0);
    for (std::size_t n = 0; n < p.size(); ++n) {
        double c = 1.0;  // binomial(n, k)
        for (std::size_t k = 0; k <= n; ++k) {
            out[k] += p[n] * c * std::pow(t, static_cast<double>(k)) * std::pow(1.0 - t, static_cast<double>(n - k));
            c = c * static_cast<double>(n - k) / static_cast<double>(k + 1);
        }
    }
    return out;
}

/// Dual-rail input whose photon-number distribution is `populations`: each
/// component |n> is routed through `rotation` from the h rail. The default
/// Hadamard prepares |+>.
inline MixedState qubit_source_state(const std::vector<double> &populations, const FockSpace &space,
                                     const Eigen::Matrix2cd &rotation = hadamard_unitary()) {
    if (populations.size() > static_cast<std::size_t>(space.dim())) throw ValidationError("qubit_source_state: populations exceed the truncation");
    ModeRegister reg = ModeRegister::uniform(2, space.dim());
    const auto n = static_cast<Eigen::Index>(reg.joint_dim());
    CMatrix rho = CMatrix::Zero(n, n);
    TransferMatrix t(rotation);
    for (std::size_t k = 0; k < populations.size(); ++k) {
        if (populations[k] == 0.0) continue;
        std::vector<int> in{static_cast<int>(k), 0};
        CVector psi = CVector::Zero(n);
        for (const auto &[occ, a] : propagate(t, in)) {
            std::vector<int> o{packed_count(occ, 0), packed_count(occ, 1)};
            psi(static_cast<Eigen::Index>(reg.index(o))) += a;
        }
        rho += populations[k] * psi * psi.adjoint();
    }
    return MixedState::from_density(reg, std::move(rho));
}

inline MixedState qubit_source_state(const SourceSpec &spec, const FockSpace &space, const Eigen::Matrix2cd &rotation = hadamard_unitary()) {
    if (space.dim() < 3) throw ValidationError("qubit_source_state: needs dim >= 3");
    const auto p = spec.probabilities();
    return qubit_source_state(std::vector<double>(p.begin(), p.end()), space, rotation);
}

/// Exactly one photon in the state cos(theta/2)|H> + e^{i phi} sin(theta/2)|V>.
inline MixedState ideal_qubit_state(const FockSpace &space, double theta = std::numbers::pi / 2, double phi = 0.0) {
    ModeRegister reg = ModeRegister::uniform(2, space.dim());
    CVector psi = CVector::Zero(static_cast<Eigen::Index>(reg.joint_dim()));
    psi(static_cast<Eigen::Index>(reg.index(std::vector<int>{1, 0}))) = std::cos(theta / 2);
    psi(static_cast<Eigen::Index>(reg.index(std::vector<int>{0, 1}))) = std::exp(Complex(0.0, phi)) * std::sin(theta / 2);
    return MixedState::from_pure(PureState(reg, psi));
}

// ---------------------------------------------------------------------------
// Heralded simulation.

struct HeraldedOutput {
    /// Probability of the herald pattern, including leaked population.
    double herald_prob = 0.0;
    /// Heralded population with a data rail above the truncation.
    double leaked = 0.0;
    /// Normalized state on the data rails (qubit order, h then v).
    std::optional<MixedState> conditional;
    bool empty() const { return !conditional.has_value(); }
};

namespace detail {

struct RailTerm {
    int h = 0;
    int v = 0;
    Complex amp;
};

using RailComponent = std::pair<double, std::vector<RailTerm>>;

inline std::vector<RailComponent> rail_components(const MixedState &input) {
    const ModeRegister &reg = input.reg();
    std::vector<RailComponent> out;
    for (auto &[w, vec] : input.ensemble()) {
        std::vector<RailTerm> terms;
        for (Eigen::Index i = 0; i < vec.size(); ++i) {
            if (std::abs(vec(i)) < 1e-14) continue;
            terms.push_back({reg.photons_in(static_cast<std::size_t>(i), 0), reg.photons_in(static_cast<std::size_t>(i), 1), vec(i)});
        }
        out.emplace_back(w, std::move(terms));
    }
    return out;
}

}  // namespace detail

/// Feeds one dual-rail input per preset qubit (plus the preset's ancilla
/// photons, vacuum elsewhere) through the interferometer and conditions on
/// the herald pattern. Herald detectors are looked up in `devices` by role.
/// With `ancilla_populations` every single-photon ancilla is replaced by an
/// incoherent mixture with that photon-number distribution.
inline HeraldedOutput run_heralded(const GatePreset &preset, std::span<const MixedState> inputs, const DeviceMap &devices, int dim,
                                   const std::optional<std::vector<double>> &ancilla_populations = std::nullopt) {
    preset.validate();
    const FockSpace space(dim);
    if (inputs.size() != preset.qubits.size()) throw RegisterMismatch("run_heralded: one input per preset qubit required");
    for (const auto &in : inputs) {
        if (in.reg().size() != 2) throw RegisterMismatch("run_heralded: each input must be a two-rail state");
    }
    const std::size_t m = preset.mode_count();
    const std::size_t nq = preset.qubits.size();
    std::vector<const DetectorModel *> herald_models;
    for (const auto &h : preset.heralds) herald_models.push_back(&device_for(devices, h.role));

    std::vector<int> data_pos(m, -1);
    PackedOccupation data_mask = 0;
    for (std::size_t q = 0; q < nq; ++q) {
        data_pos[preset.qubits[q].h_mode] = static_cast<int>(2 * q);
        data_pos[preset.qubits[q].v_mode] = static_cast<int>(2 * q + 1);
        data_mask |= PackedOccupation{0xF} << (4 * preset.qubits[q].h_mode);
        data_mask |= PackedOccupation{0xF} << (4 * preset.qubits[q].v_mode);
    }
    ModeRegister out_reg = ModeRegister::uniform(2 * nq, dim);
    const auto out_dim = static_cast<Eigen::Index>(out_reg.joint_dim());

    std::vector<std::vector<detail::RailComponent>> comps;
    for (const auto &in : inputs) comps.push_back(detail::rail_components(in));

    // Ancilla configurations with their weights.
    std::vector<std::pair<double, std::vector<int>>> ancilla_configs{{1.0, std::vector<int>(m, 0)}};
    for (const auto &a : preset.ancillas) {
        std::vector<std::pair<double, std::vector<int>>> next;
        for (const auto &[w, occ] : ancilla_configs) {
            if (ancilla_populations && a.photons == 1) {
                for (std::size_t n = 0; n < ancilla_populations->size(); ++n) {
                    const double p = (*ancilla_populations)[n];
                    if (p == 0.0) continue;
                    next.emplace_back(w * p, occ);
                    next.back().second[a.mode] = static_cast<int>(n);
                }
            } else {
                next.emplace_back(w, occ);
                next.back().second[a.mode] = a.photons;
            }
        }
        ancilla_configs = std::move(next);
    }

    Propagator prop(preset.transfer);
    CMatrix rho = CMatrix::Zero(out_dim, out_dim);
    double leaked = 0.0;

    for (const auto &c : comps) {
        if (c.empty()) return {};
    }
    for (const auto &[ancilla_weight, base] : ancilla_configs) {
    std::vector<std::size_t> pick(nq, 0);
    while (true) {
        double weight = ancilla_weight;
        for (std::size_t q = 0; q < nq; ++q) weight *= comps[q][pick[q]].first;

        // Superpose the outputs of every input configuration in this component.
        SparseFockVector out;
        std::vector<int> occ = base;
        std::function<void(std::size_t, Complex)> expand = [&](std::size_t q, Complex amp) {
            if (q == nq) {
                for (const auto &[o, a] : prop(occ)) out[o] += amp * a;
                return;
            }
            const auto &qb = preset.qubits[q];
            for (const auto &t : comps[q][pick[q]].second) {
                occ[qb.h_mode] = t.h;
                occ[qb.v_mode] = t.v;
                expand(q + 1, amp * t.amp);
            }
            occ[qb.h_mode] = 0;
            occ[qb.v_mode] = 0;
        };
        expand(0, Complex(1.0));

        std::unordered_map<PackedOccupation, std::vector<std::pair<PackedOccupation, Complex>>> groups;
        for (const auto &[o, a] : out) {
            if (std::norm(a) < 1e-30) continue;
            groups[o & ~data_mask].emplace_back(o, a);
        }
        std::vector<std::pair<Eigen::Index, Complex>> vec;
        for (const auto &[key, entries] : groups) {
            double wg = weight;
            for (std::size_t h = 0; h < preset.heralds.size(); ++h) {
                wg *= outcome_probability(*herald_models[h], preset.heralds[h].outcome, packed_count(key, preset.heralds[h].mode));
            }
            if (wg == 0.0) continue;
            vec.clear();
            for (const auto &[o, a] : entries) {
                std::size_t idx = 0;
                bool leak = false;
                for (std::size_t k = 0; k < m; ++k) {
                    if (data_pos[k] < 0) continue;
                    const int n = packed_count(o, k);
                    if (n >= dim) {
                        leak = true;
                        break;
                    }
                    idx += static_cast<std::size_t>(n) * out_reg.stride(static_cast<std::size_t>(data_pos[k]));
                }
                if (leak) {
                    leaked += wg * std::norm(a);
                } else {
                    vec.emplace_back(static_cast<Eigen::Index>(idx), a);
                }
            }
            for (const auto &[i, ai] : vec) {
                for (const auto &[j, aj] : vec) rho(i, j) += wg * ai * std::conj(aj);
            }
        }

        std::size_t q = 0;
        while (q < nq && ++pick[q] == comps[q].size()) pick[q++] = 0;
        if (q == nq) break;
    }
    }
    const double retained = rho.trace().real();
    HeraldedOutput result;
    result.herald_prob = retained + leaked;
    result.leaked = leaked;
    if (!(retained > 0.0)) return result;
    rho = 0.5 * (rho + rho.adjoint().eval());
    result.conditional = MixedState::from_density(out_reg, rho / retained);
    return result;
}

inline HeraldedOutput run_heralded(const GatePreset &preset, std::initializer_list<MixedState> inputs, const DeviceMap &devices, int dim,
                                   const std::optional<std::vector<double>> &ancilla_populations = std::nullopt) {
    std::vector<MixedState> v(inputs);
    return run_heralded(preset, std::span<const MixedState>(v), devices, dim, ancilla_populations);
}

/// Logical map of a preset for perfect single-photon inputs and a perfect
/// herald: entry (out, in) is the amplitude of logical output `out` given
/// logical input `in`, with heralded modes showing their nominal pattern
/// (one photon for click and exactly_one, none for no_click) and every
/// other non-data mode empty.
inline CMatrix ideal_logical_map(const GatePreset &preset) {
    preset.validate();
    const std::size_t nq = preset.qubits.size();
    const std::size_t m = preset.mode_count();
    const Eigen::Index d = Eigen::Index{1} << nq;
    std::vector<int> expected(m, 0);
    for (const auto &h : preset.heralds) expected[h.mode] = h.outcome == HeraldOutcome::no_click ? 0 : 1;
    std::vector<int> base(m, 0);
    for (const auto &a : preset.ancillas) base[a.mode] = a.photons;
    CMatrix k = CMatrix::Zero(d, d);
    for (Eigen::Index in = 0; in < d; ++in) {
        std::vector<int> occ = base;
        for (std::size_t q = 0; q < nq; ++q) {
            const bool one = (in >> (nq - 1 - q)) & 1;
            occ[one ? preset.qubits[q].v_mode : preset.qubits[q].h_mode] = 1;
        }
        for (const auto &[o, a] : propagate(preset.transfer, occ)) {
            std::vector<int> out = unpack_occupation(o, m);
            Eigen::Index logical = 0;
            bool ok = true;
            std::vector<bool> is_data(m, false);
            for (std::size_t q = 0; q < nq; ++q) {
                const int h = out[preset.qubits[q].h_mode], v = out[preset.qubits[q].v_mode];
                is_data[preset.qubits[q].h_mode] = is_data[preset.qubits[q].v_mode] = true;
                if (h + v != 1) ok = false;
                logical = (logical << 1) | (v == 1 ? 1 : 0);
            }
            for (std::size_t j = 0; j < m && ok; ++j) {
                if (!is_data[j] && out[j] != expected[j]) ok = false;
            }
            if (ok) k(logical, in) += a;
        }
    }
    return k;
}

/// |Tr(target^dag K)|^2 / (d Tr(K^dag K)): fidelity of the normalized
/// process K against the unitary `target`.
inline double process_fidelity(const CMatrix &kraus, const CMatrix &target) {
    const double norm = (kraus.adjoint() * kraus).trace().real();
    if (!(norm > 0.0)) return 0.0;
    return std::norm((target.adjoint() * kraus).trace()) / (static_cast<double>(kraus.rows()) * norm);
}

inline CMatrix cz_matrix() {
    CMatrix cz = CMatrix::Identity(4, 4);
    cz(3, 3) = -1.0;
    return cz;
}

// ---------------------------------------------------------------------------
// Type-I fusion.

/// Which qubit of each input pair enters the fusion (0 or 1).
struct FusionRails {
    std::size_t pair_a_fused = 1;
    std::size_t pair_b_fused = 0;
};

struct FusionOutput {
    double success_prob = 0.0;
    double leaked = 0.0;
    /// Normalized state of (kept qubit of A, fused output qubit, kept qubit of B).
    std::optional<MixedState> state;
    bool empty() const { return !state.has_value(); }
};

/// Fuses one qubit of each pair on a polarizing beamsplitter. The H
/// component of the A qubit and the V component of the B qubit continue as
/// the output qubit; the other port is analyzed at 45 degrees by two
/// detectors and success is one click at exactly one of them (a Z correction
/// follows the minus outcome). Both pairs must be two-qubit states on
/// uniform registers of the same dimension.
inline FusionOutput fusion_type1(const MixedState &pair_a, const MixedState &pair_b, const DetectorModel &plus_detector,
                                 const DetectorModel &minus_detector, FusionRails rails = {}) {
    if (rails.pair_a_fused > 1 || rails.pair_b_fused > 1) throw ValidationError("fusion_type1: fused qubit index must be 0 or 1");
    const ModeRegister &ra = pair_a.reg();
    if (ra.size() != 4 || !(pair_b.reg() == ra)) throw RegisterMismatch("fusion_type1: both pairs need the same four-rail register");
    const int dim = ra.dim(0);
    for (std::size_t k = 1; k < 4; ++k) {
        if (ra.dim(k) != dim) throw RegisterMismatch("fusion_type1: rails must share one truncation");
    }
    const Eigen::Index d = static_cast<Eigen::Index>(dim) * dim;  // per-qubit local dimension

    auto qubit_modes = [](std::size_t q) { return std::array<std::size_t, 2>{2 * q, 2 * q + 1}; };
    auto ak = qubit_modes(1 - rails.pair_a_fused), af = qubit_modes(rails.pair_a_fused);
    auto bf = qubit_modes(rails.pair_b_fused), bk = qubit_modes(1 - rails.pair_b_fused);
    std::vector<std::size_t> order_a{ak[0], ak[1], af[0], af[1]};
    std::vector<std::size_t> order_b{bf[0], bf[1], bk[0], bk[1]};
    const CMatrix rho_a = permute_modes(pair_a, order_a).density();  // (a_keep, a_fused)
    const CMatrix rho_b = permute_modes(pair_b, order_b).density();  // (b_fused, b_keep)

    // Interferometer on [a_fused H, a_fused V, b_fused H, b_fused V] ->
    // [out H, out V, detector +, detector -].
    const double s = 1.0 / std::sqrt(2.0);
    CMatrix f = CMatrix::Zero(4, 4);
    f(0, 0) = 1.0;
    f(1, 3) = 1.0;
    f(2, 2) = s;
    f(2, 1) = s;
    f(3, 2) = s;
    f(3, 1) = -s;
    const TransferMatrix fuse(f);

    // Effective operator on (out qubit) x (fused input index), weighted by
    // the detector response, as G[(p, p'), (x, x')] = sum_f e_f K_f K_f^*.
    struct Entry {
        Eigen::Index p;
        Eigen::Index x;
        Complex a;
    };
    std::map<std::array<int, 3>, std::vector<Entry>> kept;             // (sign, n+, n-)
    std::map<std::array<int, 5>, std::vector<Entry>> leaked_entries;   // (sign, n+, n-, pH, pV)
    const Eigen::Index nx = d * d;
    for (Eigen::Index x = 0; x < nx; ++x) {
        const Eigen::Index xa = x / d, xb = x % d;
        std::vector<int> in{static_cast<int>(xa / dim), static_cast<int>(xa % dim), static_cast<int>(xb / dim), static_cast<int>(xb % dim)};
        for (const auto &[o, a] : propagate(fuse, in)) {
            const int ph = packed_count(o, 0), pv = packed_count(o, 1), np = packed_count(o, 2), nm = packed_count(o, 3);
            for (int sign = 0; sign < 2; ++sign) {
                const Complex amp = (sign == 1 && (pv & 1)) ? -a : a;
                if (ph < dim && pv < dim) {
                    kept[{sign, np, nm}].push_back({static_cast<Eigen::Index>(ph * dim + pv), x, amp});
                } else {
                    leaked_entries[{sign, np, nm, ph, pv}].push_back({0, x, amp});
                }
            }
        }
    }
    auto weight = [&](int sign, int np, int nm) {
        return sign == 0 ? plus_detector.click(np) * minus_detector.no_click(nm) : plus_detector.no_click(np) * minus_detector.click(nm);
    };

    // Rows (a2, a2', p, p'), columns (b1, b1').
    CMatrix g = CMatrix::Zero(d * d * d * d, d * d);
    for (const auto &[key, entries] : kept) {
        const double e = weight(key[0], key[1], key[2]);
        if (e == 0.0) continue;
        for (const auto &u : entries) {
            const Eigen::Index a2 = u.x / d, b1 = u.x % d;
            for (const auto &v : entries) {
                const Eigen::Index a2p = v.x / d, b1p = v.x % d;
                g(((a2 * d + a2p) * d + u.p) * d + v.p, b1 * d + b1p) += e * u.a * std::conj(v.a);
            }
        }
    }
    CMatrix g_leak = CMatrix::Zero(nx, nx);
    for (const auto &[key, entries] : leaked_entries) {
        const double e = weight(key[0], key[1], key[2]);
        if (e == 0.0) continue;
        for (const auto &u : entries) {
            for (const auto &v : entries) g_leak(u.x, v.x) += e * u.a * std::conj(v.a);
        }
    }

    // Contract with rho_b over (b1, b1'), then rho_a over (a2, a2').
    CMatrix rb(d * d, d * d);  // rows (b1, b1'), cols (b2, b2')
    CMatrix ra_m(d * d, d * d);  // rows (a1, a1'), cols (a2, a2')
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            for (Eigen::Index k = 0; k < d; ++k) {
                for (Eigen::Index l = 0; l < d; ++l) {
                    rb(i * d + k, j * d + l) = rho_b(i * d + j, k * d + l);
                    ra_m(i * d + k, j * d + l) = rho_a(i * d + j, k * d + l);
                }
            }
        }
    }
    const CMatrix r = g * rb;  // rows (a2, a2', p, p'), cols (b2, b2')
    CMatrix r2(d * d, d * d * d * d);  // rows (a2, a2'), cols (p, p', b2, b2')
    for (Eigen::Index aa = 0; aa < d * d; ++aa) {
        for (Eigen::Index pp = 0; pp < d * d; ++pp) {
            for (Eigen::Index bb = 0; bb < d * d; ++bb) r2(aa, pp * d * d + bb) = r(aa * d * d + pp, bb);
        }
    }
    const CMatrix out2 = ra_m * r2;  // rows (a1, a1'), cols (p, p', b2, b2')
    const Eigen::Index od = d * d * d;
    CMatrix rho = CMatrix::Zero(od, od);
    for (Eigen::Index a1 = 0; a1 < d; ++a1) {
        for (Eigen::Index a1p = 0; a1p < d; ++a1p) {
            for (Eigen::Index p = 0; p < d; ++p) {
                for (Eigen::Index pp = 0; pp < d; ++pp) {
                    for (Eigen::Index b2 = 0; b2 < d; ++b2) {
                        for (Eigen::Index b2p = 0; b2p < d; ++b2p) {
                            rho((a1 * d + p) * d + b2, (a1p * d + pp) * d + b2p) =
                                out2(a1 * d + a1p, ((p * d + pp) * d + b2) * d + b2p);
                        }
                    }
                }
            }
        }
    }

    // Leak: G_leak contracted with the reduced states of the fused qubits.
    CMatrix red_a = CMatrix::Zero(d, d), red_b = CMatrix::Zero(d, d);
    for (Eigen::Index k = 0; k < d; ++k) {
        red_a += rho_a.block(k * d, k * d, d, d);
        for (Eigen::Index i = 0; i < d; ++i) {
            for (Eigen::Index j = 0; j < d; ++j) red_b(i, j) += rho_b(i * d + k, j * d + k);
        }
    }
    double leak = 0.0;
    for (Eigen::Index x = 0; x < nx; ++x) {
        for (Eigen::Index y = 0; y < nx; ++y) {
            if (g_leak(x, y) == Complex(0.0)) continue;
            leak += (g_leak(x, y) * red_a(x / d, y / d) * red_b(x % d, y % d)).real();
        }
    }

    FusionOutput result;
    const double retained = rho.trace().real();
    result.success_prob = retained + leak;
    result.leaked = leak;
    if (!(retained > 0.0)) return result;
    rho = 0.5 * (rho + rho.adjoint().eval());
    result.state = MixedState::from_density(ModeRegister::uniform(6, dim), rho / retained);
    return result;
}

// ---------------------------------------------------------------------------
// Circuit pipelines.

enum class CircuitId { bell_ppbs, ghz_ppbs, klm1, klm2 };

inline std::string to_string(CircuitId c) {
    switch (c) {
        case CircuitId::bell_ppbs:
            return "bell-ppbs";
        case CircuitId::ghz_ppbs:
            return "ghz-ppbs";
        case CircuitId::klm1:
            return "1-klm";
        case CircuitId::klm2:
            return "2-klm";
    }
    return "?";
}

inline CircuitId circuit_from_string(const std::string &s) {
    if (s == "bell-ppbs") return CircuitId::bell_ppbs;
    if (s == "ghz-ppbs") return CircuitId::ghz_ppbs;
    if (s == "1-klm") return CircuitId::klm1;
    if (s == "2-klm") return CircuitId::klm2;
    throw ValidationError("unknown circuit '" + s + "'");
}

/// Post-selected circuits are judged on conclusive analyzer events only.
inline bool is_post_selected(CircuitId c) { return c == CircuitId::bell_ppbs || c == CircuitId::ghz_ppbs; }

inline std::size_t qubit_count(CircuitId c) { return c == CircuitId::bell_ppbs || c == CircuitId::klm1 ? 2 : 3; }

struct CircuitOutput {
    CircuitId circuit = CircuitId::bell_ppbs;
    /// Probability of the heralding event (1 for post-selected circuits).
    double herald_prob = 0.0;
    double leaked = 0.0;
    std::optional<MixedState> state;
    bool empty() const { return !state.has_value(); }
};

/// Default device roles: SPD herald and fusion detectors, SPD analyzers for
/// the heralded circuits, bucket analyzers for post-selected ones.
inline DeviceMap default_devices(CircuitId c, double efficiency = 1.0, double dark_count = 0.0) {
    DetectorModel spd{DetectorKind::spd, efficiency, dark_count, 1.0};
    DetectorModel bucket{DetectorKind::bucket, efficiency, dark_count, 1.0};
    return {{"herald", spd}, {"fusion", spd}, {"analyzer", is_post_selected(c) ? bucket : spd}};
}

/// Bell pair (|HH> + |VV>)/sqrt2 target from two |+> sources and a PPBS.
inline GatePreset bell_ppbs_preset() { return with_output_frame(ppbs_cphase(), {{1, hadamard_unitary()}}); }

/// GHZ (|HHH> + |VVV>)/sqrt2 target from three |+> sources and two PPBS.
inline GatePreset ghz_ppbs_preset() {
    return with_output_frame(chain_cphase_ghz(), {{0, hadamard_unitary()}, {2, hadamard_unitary()}});
}

/// Heralded Bell pair (|HH> + |VV>)/sqrt2 target from the KLM gate.
inline GatePreset klm_bell_preset() { return with_output_frame(klm_cz(), {{1, hadamard_unitary()}}); }

struct CircuitOptions {
    /// Transmittance of every photon path between source and circuit.
    double transmission = 1.0;
    /// Draw the ancilla photons from the same source as the data photons.
    bool sourced_ancillas = true;
};

/// Devices and options for a total system efficiency `eta`: every photon
/// path is attenuated by eta and detectors have unit efficiency with
/// dark-count probability `dark_count`. Uniform loss commutes with the
/// passive network, so this equals lossy detectors plus lossy data outputs.
struct CircuitConditions {
    DeviceMap devices;
    CircuitOptions options;
};

inline CircuitConditions total_efficiency_conditions(CircuitId c, double eta, double dark_count = 0.0) {
    if (!(eta >= 0.0 && eta <= 1.0)) throw ValidationError("total efficiency must lie in [0, 1]");
    return {default_devices(c, 1.0, dark_count), CircuitOptions{eta, true}};
}

/// Runs one circuit with every data photon from `source`.
inline CircuitOutput run_circuit(CircuitId circuit, const SourceSpec &source, const DeviceMap &devices, int dim,
                                 const CircuitOptions &options = {}) {
    const FockSpace space(dim);
    const auto p3 = source.probabilities();
    const std::vector<double> pops = thin_populations(std::vector<double>(p3.begin(), p3.end()), options.transmission);
    const MixedState q = qubit_source_state(pops, space);
    std::optional<std::vector<double>> anc;
    if (options.sourced_ancillas) {
        anc = pops;
    } else if (options.transmission < 1.0) {
        anc = thin_populations({0.0, 1.0}, options.transmission);
    }
    CircuitOutput out;
    out.circuit = circuit;
    auto from_heralded = [&](const HeraldedOutput &h) {
        out.herald_prob = h.herald_prob;
        out.leaked = h.leaked;
        out.state = h.conditional;
    };
    switch (circuit) {
        case CircuitId::bell_ppbs:
            from_heralded(run_heralded(bell_ppbs_preset(), {q, q}, devices, dim));
            break;
        case CircuitId::ghz_ppbs:
            from_heralded(run_heralded(ghz_ppbs_preset(), {q, q, q}, devices, dim));
            break;
        case CircuitId::klm1:
            from_heralded(run_heralded(klm_bell_preset(), {q, q}, devices, dim, anc));
            break;
        case CircuitId::klm2: {
            HeraldedOutput pair = run_heralded(klm_bell_preset(), {q, q}, devices, dim, anc);
            if (pair.empty()) {
                out.herald_prob = 0.0;
                break;
            }
            const DetectorModel &fd = device_for(devices, "fusion");
            FusionOutput f = fusion_type1(*pair.conditional, *pair.conditional, fd, fd);
            out.herald_prob = pair.herald_prob * pair.herald_prob * f.success_prob;
            out.leaked = f.leaked;
            out.state = f.state;
            break;
        }
    }
    return out;
}

}  // namespace fockbench
