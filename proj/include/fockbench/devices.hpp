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

// Source and detector models: the two-parameter single-photon source, bucket
// and photon-resolving detectors, SPDC pair generation, heralding,
// multiplexing and switch losses.

#pragma once

#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <string>

#include "fockbench/fock_core.hpp"

namespace fockbench {

// ---------------------------------------------------------------------------
// Two-parameter source.

/// Source emitting sqrt(1-eps^2)|0> + eps sqrt(1-omega^2)|1> + eps omega|2>.
struct SourceSpec {
    double epsilon = 1.0;
    double omega = 0.0;

    void validate() const {
        if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw ValidationError("SourceSpec.epsilon must lie in [0, 1]");
        if (!(omega >= 0.0 && omega <= 1.0)) throw ValidationError("SourceSpec.omega must lie in [0, 1]");
    }

    /// Photon-number probabilities (p0, p1, p2).
    std::array<double, 3> probabilities() const {
        validate();
        const double e2 = epsilon * epsilon, w2 = omega * omega;
        return {1.0 - e2, e2 * (1.0 - w2), e2 * w2};
    }

    double herald_probability() const { return epsilon * epsilon; }

    /// Closed form 2 omega^2 / (eps^2 (1 + omega^2)^2); zero for vacuum.
    double g2() const {
        if (epsilon == 0.0) return 0.0;
        const double w2 = omega * omega;
        return 2.0 * w2 / (epsilon * epsilon * (1.0 + w2) * (1.0 + w2));
    }

    bool operator==(const SourceSpec &) const = default;
};

/// Source whose emission has non-vacuum probability `p_hrld` and g2(0) equal
/// to `g2`. Requires 2 g2 p_hrld <= 1.
inline SourceSpec source_from_targets(double p_hrld, double g2) {
    if (!(p_hrld >= 0.0 && p_hrld <= 1.0)) throw ValidationError("source_from_targets: P_hrld must lie in [0, 1]");
    if (!(g2 >= 0.0)) throw ValidationError("source_from_targets: g2 must be non-negative");
    if (p_hrld == 0.0) return {0.0, 0.0};
    double p2 = 0.0;
    if (g2 > 0.0) {
        const double disc = 1.0 - 2.0 * g2 * p_hrld;
        if (disc < 0.0) throw ValidationError("source_from_targets: g2 too large for this P_hrld");
        // Rationalized root, stable for small g2.
        p2 = g2 * p_hrld * p_hrld / ((1.0 - g2 * p_hrld) + std::sqrt(disc));
    }
    return {std::sqrt(p_hrld), std::sqrt(std::min(1.0, p2 / p_hrld))};
}

inline PureState parametric_source(const SourceSpec &spec, const FockSpace &space) {
    if (space.dim() < 3) throw ValidationError("parametric_source: needs dim >= 3 to hold the two-photon term");
    spec.validate();
    const double e = spec.epsilon, w = spec.omega;
    CVector v = CVector::Zero(space.dim());
    v(0) = std::sqrt(1.0 - e * e);
    v(1) = e * std::sqrt(1.0 - w * w);
    v(2) = e * w;
    return PureState(ModeRegister({space}), v).normalized();
}

/// Photon-number mixture with the same populations as parametric_source.
inline MixedState dephased_source(const SourceSpec &spec, const FockSpace &space) {
    if (space.dim() < 3) throw ValidationError("dephased_source: needs dim >= 3 to hold the two-photon term");
    auto p = spec.probabilities();
    return MixedState::diagonal(ModeRegister({space}), {{p[0], 0}, {p[1], 1}, {p[2], 2}});
}

// ---------------------------------------------------------------------------
// Detectors.

enum class DetectorKind { bucket, spd };

inline std::string to_string(DetectorKind k) { return k == DetectorKind::bucket ? "bucket" : "spd"; }

inline DetectorKind detector_kind_from_string(const std::string &s) {
    if (s == "bucket") return DetectorKind::bucket;
    if (s == "spd") return DetectorKind::spd;
    throw ValidationError("unknown detector kind '" + s + "'");
}

/// `efficiency` is the total efficiency (detector times optics);
/// `dark_count_prob` is per time bin `time_bin`.
struct DetectorModel {
    DetectorKind kind = DetectorKind::spd;
    double efficiency = 1.0;
    double dark_count_prob = 0.0;
    double time_bin = 1.0;

    static DetectorModel ideal_spd() { return {DetectorKind::spd, 1.0, 0.0, 1.0}; }
    static DetectorModel ideal_bucket() { return {DetectorKind::bucket, 1.0, 0.0, 1.0}; }

    void validate() const {
        if (!(efficiency >= 0.0 && efficiency <= 1.0)) throw ValidationError("DetectorModel.efficiency must lie in [0, 1]");
        if (!(dark_count_prob >= 0.0 && dark_count_prob <= 1.0)) {
            throw ValidationError("DetectorModel.dark_count_prob must lie in [0, 1]");
        }
        if (!(time_bin > 0.0)) throw ValidationError("DetectorModel.time_bin must be positive");
    }

    /// Click probability for n incident photons. For an SPD a click means
    /// exactly one photon was registered.
    double click(int n) const {
        const double miss = 1.0 - efficiency;
        double base;
        if (kind == DetectorKind::bucket) {
            base = 1.0 - std::pow(miss, n);
        } else {
            base = n == 0 ? 0.0 : n * efficiency * std::pow(miss, n - 1);
        }
        return std::min(base + dark_count_prob, 1.0);
    }

    double no_click(int n) const { return std::max(std::pow(1.0 - efficiency, n) - dark_count_prob, 0.0); }

    bool operator==(const DetectorModel &) const = default;
};

struct DetectorOperators {
    FockOperator click;
    FockOperator no_click;
};

namespace detail {
inline DetectorOperators detector_operators(const FockSpace &space, const DetectorModel &model) {
    model.validate();
    Eigen::VectorXd c(space.dim()), nc(space.dim());
    for (int n = 0; n < space.dim(); ++n) {
        c(n) = model.click(n);
        nc(n) = model.no_click(n);
    }
    ModeRegister reg({space});
    return {FockOperator::from_diagonal(reg, c), FockOperator::from_diagonal(reg, nc)};
}
}  // namespace detail

inline DetectorOperators bucket_detector(const FockSpace &space, const DetectorModel &model) {
    if (model.kind != DetectorKind::bucket) throw ValidationError("bucket_detector: model kind is not bucket");
    return detail::detector_operators(space, model);
}

inline DetectorOperators spd_detector(const FockSpace &space, const DetectorModel &model) {
    if (model.kind != DetectorKind::spd) throw ValidationError("spd_detector: model kind is not spd");
    return detail::detector_operators(space, model);
}

inline DetectorOperators detector_operators(const FockSpace &space, const DetectorModel &model) {
    return detail::detector_operators(space, model);
}

// ---------------------------------------------------------------------------
// SPDC.

struct SqueezerSpec {
    double squeeze_param = 0.0;

    void validate() const {
        if (!(squeeze_param >= 0.0)) throw ValidationError("SqueezerSpec.squeeze_param must be non-negative");
        if (!(squeeze_param < std::atanh(0.99))) throw ValidationError("SqueezerSpec.squeeze_param exceeds atanh(0.99)");
    }
};

/// a1^dag a2^dag + a1 a2 on two modes of dimension `space.dim()`.
inline FockOperator spdc_hamiltonian(const FockSpace &space) {
    ModeRegister reg = ModeRegister::uniform(2, space.dim());
    FockOperator a1 = embed(annihilation(space), reg, 0);
    FockOperator a2 = embed(annihilation(space), reg, 1);
    FockOperator pair = a1.adjoint() * a2.adjoint();
    CMatrix h = pair.matrix() + pair.matrix().adjoint();
    return FockOperator(reg, std::move(h), {false, true, false});
}

inline FockOperator spdc_unitary(const SqueezerSpec &spec, const FockSpace &space) {
    spec.validate();
    return evolve_hamiltonian(spdc_hamiltonian(space), spec.squeeze_param);
}

/// exp(-i eps H_SPDC)|00>; mode 0 is the trigger arm, mode 1 the signal arm.
inline PureState spdc_state(const SqueezerSpec &spec, const FockSpace &space) {
    FockOperator u = spdc_unitary(spec, space);
    const PureState vac = vacuum(u.reg());
    return PureState(u.reg(), u.matrix() * vac.amplitudes());
}

// ---------------------------------------------------------------------------
// Heralding and multiplexing.

/// Source output per time bin: vacuum with weight Q (no trigger) and
/// photon-number components delivered on a trigger. A component at n = 0
/// comes from a trigger without a signal photon (dark count or loss).
struct HeraldedMixture {
    double vacuum_weight = 1.0;
    std::map<int, double> components;
    int source_count = 1;

    double trigger_probability() const { return 1.0 - vacuum_weight; }

    double population(int n) const {
        auto it = components.find(n);
        double p = it == components.end() ? 0.0 : it->second;
        return n == 0 ? p + vacuum_weight : p;
    }

    double total_weight() const {
        double s = vacuum_weight;
        for (auto [n, w] : components) s += w;
        return s;
    }

    /// Probability of a non-vacuum output.
    double herald_probability() const {
        double s = 0.0;
        for (auto [n, w] : components) {
            if (n > 0) s += w;
        }
        return s;
    }

    double mean_photons() const {
        double s = 0.0;
        for (auto [n, w] : components) s += n * w;
        return s;
    }

    double g2() const {
        const double m = mean_photons();
        if (!(m > 0.0)) throw ValidationError("g2 undefined: zero mean photon number");
        double s = 0.0;
        for (auto [n, w] : components) s += static_cast<double>(n) * (n - 1) * w;
        return s / (m * m);
    }

    /// g2 given that a source fired: unchanged by multiplexing and by loss.
    double conditional_g2() const { return g2() * (1.0 - vacuum_weight); }

    /// p1 / (1 - p0): single-photon share of non-vacuum output.
    double single_photon_fraction() const {
        const double nv = herald_probability();
        if (!(nv > 0.0)) return 0.0;
        return population(1) / nv;
    }

    /// Diagonal state on one mode; components above the truncation throw.
    MixedState to_state(const FockSpace &space) const {
        std::vector<DiagonalTerm> terms{{vacuum_weight, 0}};
        for (auto [n, w] : components) {
            if (n >= space.dim()) throw std::out_of_range("HeraldedMixture::to_state: component exceeds truncation");
            terms.push_back({w, static_cast<std::size_t>(n)});
        }
        return MixedState::diagonal(ModeRegister({space}), std::move(terms));
    }
};

/// Populations below this are roundoff from the pair-state exponential.
inline constexpr double kNegligibleWeight = 1e-20;

struct HeraldResult {
    double trigger_probability = 0.0;
    /// Empty when the trigger never fires.
    std::optional<HeraldedMixture> heralded;
};

/// Heralds mode 1 of a two-mode pair state on a click of `trigger` at mode 0.
inline HeraldResult herald_single(const PureState &pair, const DetectorModel &trigger) {
    if (pair.reg().size() != 2) throw RegisterMismatch("herald_single: expects a two-mode state");
    DetectorOperators ops = detector_operators(pair.reg().modes()[0], trigger);
    std::vector<double> weight(static_cast<std::size_t>(pair.reg().dim(0)));
    for (std::size_t n = 0; n < weight.size(); ++n) weight[n] = ops.click(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)).real();
    std::vector<std::size_t> keep{1};
    auto split = detail::split_register(pair.reg(), keep);
    MixedState signal = detail::weighted_trace(MixedState::from_pure(pair), split, weight);
    Eigen::VectorXd pop = signal.populations();
    HeraldedMixture h;
    double fired = 0.0;
    for (Eigen::Index n = 0; n < pop.size(); ++n) {
        if (pop(n) <= kNegligibleWeight) continue;
        h.components[static_cast<int>(n)] = pop(n);
        fired += pop(n);
    }
    h.vacuum_weight = 1.0 - fired;
    if (!(fired > 0.0)) return {0.0, std::nullopt};
    return {fired, h};
}

/// Multiplexed output of S identical heralded sources behind an ideal switch.
inline HeraldedMixture multiplex(const HeraldedMixture &single, int sources) {
    if (sources < 1) throw ValidationError("multiplex: source count must be >= 1");
    if (single.source_count != 1) throw ValidationError("multiplex: input must be a single-source mixture");
    HeraldedMixture out;
    out.source_count = sources;
    const double q = single.vacuum_weight;
    if (q >= 1.0) {
        out.vacuum_weight = 1.0;
        return out;
    }
    const double qs = std::pow(q, sources);
    const double scale = (1.0 - qs) / (1.0 - q);
    out.vacuum_weight = qs;
    for (auto [n, w] : single.components) out.components[n] = w * scale;
    return out;
}

/// Photon loss on the delivered photons: binomial thinning at transmittance t.
inline HeraldedMixture attenuate(const HeraldedMixture &in, double t) {
    if (!(t >= 0.0 && t <= 1.0)) throw ValidationError("attenuate: transmittance must lie in [0, 1]");
    HeraldedMixture out;
    out.vacuum_weight = in.vacuum_weight;
    out.source_count = in.source_count;
    for (auto [n, w] : in.components) {
        double binom = 1.0;
        for (int k = 0; k <= n; ++k) {
            if (k > 0) binom = binom * (n - k + 1) / k;
            const double p = binom * std::pow(t, n - k) * std::pow(1.0 - t, k);
            if (p > 0.0) out.components[n - k] += w * p;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Switches and loss.

enum class SwitchScheme { linear, binary, multiport };

inline std::string to_string(SwitchScheme s) {
    switch (s) {
        case SwitchScheme::linear:
            return "linear";
        case SwitchScheme::binary:
            return "binary";
        case SwitchScheme::multiport:
            return "multiport";
    }
    return "?";
}

inline SwitchScheme switch_scheme_from_string(const std::string &s) {
    if (s == "linear" || s == "A") return SwitchScheme::linear;
    if (s == "binary" || s == "B") return SwitchScheme::binary;
    if (s == "multiport" || s == "C") return SwitchScheme::multiport;
    throw ValidationError("unknown switch scheme '" + s + "'");
}

struct SwitchSpec {
    SwitchScheme scheme = SwitchScheme::linear;
    double element_transmittance = 0.98;
    int source_count = 1;
};

/// Transmittance seen by one photon routed through the switch network.
inline double switch_loss(const SwitchSpec &spec) {
    if (spec.source_count < 1) throw ValidationError("switch_loss: source count must be >= 1");
    const double t = spec.element_transmittance;
    if (!(t > 0.0 && t <= 1.0)) throw ValidationError("switch_loss: element transmittance must lie in (0, 1]");
    switch (spec.scheme) {
        case SwitchScheme::linear:
            return t;
        case SwitchScheme::binary: {
            int depth = 0;
            while ((1 << depth) < spec.source_count) ++depth;
            return std::pow(t, depth);
        }
        case SwitchScheme::multiport:
            return std::pow(t, spec.source_count);
    }
    return t;
}

/// Beamsplitter-to-environment loss on `mode`.
inline MixedState loss_channel(const MixedState &state, double transmittance, std::size_t mode) {
    const double t = transmittance;
    if (!(t >= 0.0 && t <= 1.0)) throw ValidationError("loss_channel: transmittance must lie in [0, 1]");
    const ModeRegister &reg = state.reg();
    if (mode >= reg.size()) throw std::out_of_range("loss_channel: mode outside register");
    const int dim = reg.dim(mode);
    auto binom = [](int n, int k) {
        double b = 1.0;
        for (int j = 1; j <= k; ++j) b = b * (n - k + j) / j;
        return b;
    };
    auto amp = [&](int n, int k) { return std::sqrt(binom(n, k) * std::pow(t, n - k) * std::pow(1.0 - t, k)); };
    const std::size_t stride = reg.stride(mode);
    if (state.is_diagonal()) {
        std::vector<DiagonalTerm> out;
        for (const auto &term : state.terms()) {
            const int n = reg.photons_in(term.index, mode);
            for (int k = 0; k <= n; ++k) {
                const double a = amp(n, k);
                if (a > 0.0) out.push_back({term.weight * a * a, term.index - static_cast<std::size_t>(k) * stride});
            }
        }
        return MixedState::diagonal(reg, std::move(out));
    }
    const CMatrix &rho = state.dense();
    const auto n_joint = static_cast<Eigen::Index>(reg.joint_dim());
    CMatrix out = CMatrix::Zero(n_joint, n_joint);
    // Kraus K_k |n> = amp(n,k) |n-k> on the lossy mode.
    for (int k = 0; k < dim; ++k) {
        for (Eigen::Index i = 0; i < n_joint; ++i) {
            const int ni = reg.photons_in(static_cast<std::size_t>(i), mode);
            if (ni < k) continue;
            const double ai = amp(ni, k);
            if (ai == 0.0) continue;
            const Eigen::Index oi = i - static_cast<Eigen::Index>(static_cast<std::size_t>(k) * stride);
            for (Eigen::Index j = 0; j < n_joint; ++j) {
                const int nj = reg.photons_in(static_cast<std::size_t>(j), mode);
                if (nj < k) continue;
                const double aj = amp(nj, k);
                if (aj == 0.0) continue;
                out(oi, j - static_cast<Eigen::Index>(static_cast<std::size_t>(k) * stride)) += ai * aj * rho(i, j);
            }
        }
    }
    return MixedState::from_density(reg, std::move(out));
}

}  // namespace fockbench
