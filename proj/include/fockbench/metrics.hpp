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

// Source quality figures, entanglement witnesses and Bell-type inequalities
// evaluated with realistic polarization analyzers.
//
// An analyzer on a dual-rail qubit rotates the rails and sends them to two
// detectors ("plus" on port 0, "minus" on port 1). Its POVM elements are
// exact for any photon number in the rails. An outcome is conclusive when
// exactly one of the two detectors clicks; conclusive outcomes carry the
// values +1 and -1, everything else 0.

#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <random>

#include "fockbench/circuits.hpp"
#include "fockbench/optimize.hpp"

namespace fockbench {

class UndefinedMetric : public std::domain_error {
   public:
    using std::domain_error::domain_error;
};

// ---------------------------------------------------------------------------
// Source figures.

namespace detail {
inline Eigen::VectorXd mode_populations(const MixedState &state, std::size_t mode) {
    const ModeRegister &reg = state.reg();
    if (mode >= reg.size()) throw std::out_of_range("mode outside register");
    Eigen::VectorXd joint = state.populations();
    Eigen::VectorXd p = Eigen::VectorXd::Zero(reg.dim(mode));
    for (std::size_t i = 0; i < reg.joint_dim(); ++i) p(reg.photons_in(i, mode)) += joint(static_cast<Eigen::Index>(i));
    return p;
}
}  // namespace detail

/// <a^dag^2 a^2> / <a^dag a>^2 on `mode`.
inline double g2_zero(const MixedState &state, std::size_t mode = 0) {
    Eigen::VectorXd p = detail::mode_populations(state, mode);
    double mean = 0.0, second = 0.0;
    for (Eigen::Index n = 0; n < p.size(); ++n) {
        mean += static_cast<double>(n) * p(n);
        second += static_cast<double>(n) * static_cast<double>(n - 1) * p(n);
    }
    if (!(mean > 0.0)) throw UndefinedMetric("g2_zero: mean photon number is zero");
    return second / (mean * mean);
}

inline double g2_zero(const PureState &state, std::size_t mode = 0) { return g2_zero(MixedState::from_pure(state), mode); }

/// 1 - probability that every mode is empty.
inline double herald_probability(const MixedState &state) {
    return 1.0 - state.populations()(0) / state.trace();
}

inline double herald_probability(const PureState &state) { return 1.0 - std::norm(state.amplitudes()(0)) / state.amplitudes().squaredNorm(); }

// ---------------------------------------------------------------------------
// Analyzers.

/// Analyzer orientation on the Bloch sphere: port 0 projects onto
/// cos(theta/2)|H> + e^{i phi} sin(theta/2)|V>.
struct AnalyzerSetting {
    double theta = 0.0;
    double phi = 0.0;
    bool operator==(const AnalyzerSetting &) const = default;
};

inline constexpr AnalyzerSetting kAnalyzerZ{0.0, 0.0};
inline constexpr AnalyzerSetting kAnalyzerX{std::numbers::pi / 2, 0.0};
inline constexpr AnalyzerSetting kAnalyzerY{std::numbers::pi / 2, std::numbers::pi / 2};

enum class SettingsMode { canonical, optimized };

inline std::string to_string(SettingsMode m) { return m == SettingsMode::canonical ? "canonical" : "optimized"; }

inline SettingsMode settings_mode_from_string(const std::string &s) {
    if (s == "canonical") return SettingsMode::canonical;
    if (s == "optimized") return SettingsMode::optimized;
    throw ValidationError("unknown settings mode '" + s + "'");
}

/// Analyzer angles used by a metric and the detectors behind them. The
/// meaning of each analyzer entry is metric specific: (a, a', b, b') for
/// CHSH and CH, (X1, Y1, X2, Y2, X3, Y3) for Mermin.
struct MeasurementSetting {
    std::vector<AnalyzerSetting> analyzers;
    DetectorModel plus_detector;
    DetectorModel minus_detector;
    SettingsMode mode = SettingsMode::canonical;
};

/// Local POVM elements of one analyzer on a two-rail register.
struct LocalPovm {
    CMatrix plus_only;
    CMatrix minus_only;
    CMatrix plus_click;

    CMatrix value() const { return plus_only - minus_only; }
    CMatrix conclusive() const { return plus_only + minus_only; }
};

inline LocalPovm analyzer_povm(const AnalyzerSetting &s, const DetectorModel &plus, const DetectorModel &minus, int dim) {
    // a_h^dag -> c a_+^dag - s a_-^dag and a_v^dag -> e s a_+^dag + e c a_-^dag,
    // expanded binomially for every input (h, v).
    const double c = std::cos(s.theta / 2), sn = std::sin(s.theta / 2);
    const Complex e = std::exp(Complex(0.0, -s.phi));
    const int top = 2 * (dim - 1);
    const Eigen::Index d = static_cast<Eigen::Index>(dim) * dim;
    const Eigen::Index outs = static_cast<Eigen::Index>(top + 1) * (top + 1);
    static thread_local std::vector<double> fact;
    if (fact.size() < static_cast<std::size_t>(top + 1)) {
        fact.assign(static_cast<std::size_t>(top + 1), 1.0);
        for (std::size_t k = 1; k < fact.size(); ++k) fact[k] = fact[k - 1] * static_cast<double>(k);
    }
    auto binom = [&](int n, int k) { return fact[static_cast<std::size_t>(n)] / (fact[static_cast<std::size_t>(k)] * fact[static_cast<std::size_t>(n - k)]); };
    CMatrix amp = CMatrix::Zero(outs, d);  // (n+ * (top + 1) + n-, input)
    for (int h = 0; h < dim; ++h) {
        for (int v = 0; v < dim; ++v) {
            const double norm = 1.0 / std::sqrt(fact[static_cast<std::size_t>(h)] * fact[static_cast<std::size_t>(v)]);
            for (int i = 0; i <= h; ++i) {
                for (int j = 0; j <= v; ++j) {
                    const int np = i + j, nm = h + v - i - j;
                    const double real = binom(h, i) * binom(v, j) * std::pow(c, i) * std::pow(-sn, h - i) * std::pow(sn, j) * std::pow(c, v - j) *
                                        std::sqrt(fact[static_cast<std::size_t>(np)] * fact[static_cast<std::size_t>(nm)]) * norm;
                    amp(np * (top + 1) + nm, h * dim + v) += real * std::pow(e, v);
                }
            }
        }
    }
    Eigen::VectorXd w_plus(outs), w_minus(outs), w_click(outs);
    for (int np = 0; np <= top; ++np) {
        for (int nm = 0; nm <= top; ++nm) {
            const Eigen::Index o = np * (top + 1) + nm;
            w_plus(o) = plus.click(np) * minus.no_click(nm);
            w_minus(o) = plus.no_click(np) * minus.click(nm);
            w_click(o) = plus.click(np);
        }
    }
    // (i, j) -> sum_out w(out) conj(A_i(out)) A_j(out)
    const CMatrix ac = amp.conjugate();
    return {ac.transpose() * w_plus.asDiagonal() * amp, ac.transpose() * w_minus.asDiagonal() * amp, ac.transpose() * w_click.asDiagonal() * amp};
}

/// Multi-qubit dual-rail density matrix restricted to the entries that
/// survive product operators conserving each qubit's photon number (all
/// analyzer POVMs do). Stored as a dense tensor over local index pairs.
class QubitBlockView {
   public:
    explicit QubitBlockView(const MixedState &state) {
        const ModeRegister &reg = state.reg();
        if (reg.size() == 0 || reg.size() % 2 != 0) throw RegisterMismatch("QubitBlockView: needs an even number of rails");
        dim_ = reg.dim(0);
        for (std::size_t k = 1; k < reg.size(); ++k) {
            if (reg.dim(k) != dim_) throw RegisterMismatch("QubitBlockView: rails must share one truncation");
        }
        nq_ = reg.size() / 2;
        const Eigen::Index d = static_cast<Eigen::Index>(dim_) * dim_;
        for (Eigen::Index i = 0; i < d; ++i) {
            for (Eigen::Index j = 0; j < d; ++j) {
                if (i / dim_ + i % dim_ == j / dim_ + j % dim_) pairs_.emplace_back(i, j);
            }
        }
        const std::size_t np = pairs_.size();
        std::size_t total = 1;
        for (std::size_t q = 0; q < nq_; ++q) total *= np;
        values_.resize(total);
        const CMatrix rho = state.density();
        std::vector<std::size_t> pick(nq_, 0);
        for (std::size_t flat = 0; flat < total; ++flat) {
            Eigen::Index i = 0, j = 0;
            for (std::size_t q = 0; q < nq_; ++q) {
                i = i * d + pairs_[pick[q]].first;
                j = j * d + pairs_[pick[q]].second;
            }
            values_[flat] = rho(i, j);
            for (std::size_t q = nq_; q-- > 0;) {
                if (++pick[q] < np) break;
                pick[q] = 0;
            }
        }
    }

    std::size_t qubits() const { return nq_; }
    int dim() const { return dim_; }

    /// Tr[(O_1 x ... x O_n) rho], real part.
    double expectation(const std::vector<const CMatrix *> &ops) const {
        if (ops.size() != nq_) throw RegisterMismatch("QubitBlockView: one operator per qubit required");
        const std::size_t np = pairs_.size();
        std::vector<Complex> work = values_;
        std::size_t len = values_.size();
        std::vector<Complex> o(np);
        for (std::size_t q = nq_; q-- > 0;) {
            for (std::size_t k = 0; k < np; ++k) o[k] = (*ops[q])(pairs_[k].second, pairs_[k].first);
            len /= np;
            for (std::size_t r = 0; r < len; ++r) {
                Complex acc = 0.0;
                const Complex *row = &work[r * np];
                for (std::size_t k = 0; k < np; ++k) acc += row[k] * o[k];
                work[r] = acc;
            }
        }
        return work[0].real();
    }

   private:
    int dim_ = 0;
    std::size_t nq_ = 0;
    std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs_;
    std::vector<Complex> values_;
};

// ---------------------------------------------------------------------------
// Results.

struct MetricResult {
    std::string name;
    double value = std::numeric_limits<double>::quiet_NaN();
    double bound = 0.0;
    /// True when values above `bound` violate (inequalities); false for
    /// witnesses, which are violated below it.
    bool violated_above = true;
    bool violated = false;
    std::optional<MeasurementSetting> settings;
    std::string target;

    /// Distance past the bound, positive when violated.
    double margin() const {
        if (std::isnan(value)) return -std::numeric_limits<double>::infinity();
        return violated_above ? value - bound : bound - value;
    }
};

inline MetricResult make_result(std::string name, double value, double bound, bool violated_above) {
    MetricResult r;
    r.name = std::move(name);
    r.value = value;
    r.bound = bound;
    r.violated_above = violated_above;
    r.violated = !std::isnan(value) && (violated_above ? value > bound : value < bound);
    return r;
}

// ---------------------------------------------------------------------------
// Witnesses.

namespace detail {

struct NamedTarget {
    std::string name;
    CVector state;
};

inline std::vector<NamedTarget> bell_targets() {
    const double r = 1.0 / std::sqrt(2.0);
    auto v = [&](Complex a, Complex b, Complex c, Complex d) { return (CVector(4) << a, b, c, d).finished(); };
    return {{"phi+", v(r, 0, 0, r)}, {"phi-", v(r, 0, 0, -r)}, {"psi+", v(0, r, r, 0)}, {"psi-", v(0, r, -r, 0)}};
}

inline std::vector<NamedTarget> ghz_targets() {
    const double r = 1.0 / std::sqrt(2.0);
    std::vector<NamedTarget> out;
    for (int x = 0; x < 4; ++x) {
        for (int sign = 0; sign < 2; ++sign) {
            CVector t = CVector::Zero(8);
            t(x) = r;
            t(7 - x) = sign == 0 ? r : -r;
            std::string label;
            for (int b = 2; b >= 0; --b) label += ((x >> b) & 1) ? '1' : '0';
            out.push_back({"ghz" + std::string(sign == 0 ? "+" : "-") + label, t});
        }
    }
    return out;
}

/// Best overlap of `rho` with a logical target embedded on one photon per
/// qubit. With `post_selected` the overlap is renormalized by the
/// population carrying exactly one photon per qubit.
inline std::pair<double, std::string> embedded_fidelity(const MixedState &rho, const std::vector<NamedTarget> &targets, bool post_selected) {
    const ModeRegister &reg = rho.reg();
    const std::size_t nq = reg.size() / 2;
    const CMatrix r = rho.density();
    std::vector<Eigen::Index> idx(std::size_t{1} << nq);
    for (std::size_t b = 0; b < idx.size(); ++b) {
        std::vector<int> occ(2 * nq, 0);
        for (std::size_t q = 0; q < nq; ++q) occ[2 * q + ((b >> (nq - 1 - q)) & 1)] = 1;
        idx[b] = static_cast<Eigen::Index>(reg.index(occ));
    }
    double norm = rho.trace();
    if (post_selected) {
        norm = 0.0;
        for (std::size_t i = 0; i < reg.joint_dim(); ++i) {
            bool one_each = true;
            for (std::size_t q = 0; q < nq && one_each; ++q) one_each = reg.photons_in(i, 2 * q) + reg.photons_in(i, 2 * q + 1) == 1;
            if (one_each) norm += r(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)).real();
        }
    }
    if (!(norm > 0.0)) return {std::numeric_limits<double>::quiet_NaN(), ""};
    double best = -std::numeric_limits<double>::infinity();
    std::string best_name;
    for (const auto &t : targets) {
        Complex f = 0.0;
        for (std::size_t a = 0; a < idx.size(); ++a) {
            for (std::size_t b = 0; b < idx.size(); ++b) f += std::conj(t.state(static_cast<Eigen::Index>(a))) * r(idx[a], idx[b]) * t.state(static_cast<Eigen::Index>(b));
        }
        if (f.real() / norm > best + 1e-12) {
            best = f.real() / norm;
            best_name = t.name;
        }
    }
    return {best, best_name};
}

inline void require_qubits(const MixedState &rho, std::size_t nq, const char *what) {
    if (rho.reg().size() != 2 * nq) throw RegisterMismatch(std::string(what) + ": expects " + std::to_string(nq) + " dual-rail qubits");
}

}  // namespace detail

/// Tr(W rho) with W = 1/2 - |B><B| and B the closest Bell state. The logical
/// projector is embedded on one photon per qubit, so vacuum and
/// multi-photon population counts against the witness. `post_selected`
/// conditions on one photon per qubit first.
inline MetricResult bell_witness(const MixedState &rho, bool post_selected = false) {
    detail::require_qubits(rho, 2, "bell_witness");
    auto [f, name] = detail::embedded_fidelity(rho, detail::bell_targets(), post_selected);
    MetricResult r = make_result("bell_witness", 0.5 - f, 0.0, false);
    r.target = name;
    return r;
}

/// As bell_witness with the GHZ family (|x> +- |~x>)/sqrt2 as targets.
inline MetricResult ghz_witness(const MixedState &rho, bool post_selected = false) {
    detail::require_qubits(rho, 3, "ghz_witness");
    auto [f, name] = detail::embedded_fidelity(rho, detail::ghz_targets(), post_selected);
    MetricResult r = make_result("ghz_witness", 0.5 - f, 0.0, false);
    r.target = name;
    return r;
}

// ---------------------------------------------------------------------------
// Bell-type inequalities.

namespace detail {

inline std::vector<double> flatten(const std::vector<AnalyzerSetting> &s) {
    std::vector<double> x;
    for (const auto &a : s) {
        x.push_back(a.theta);
        x.push_back(a.phi);
    }
    return x;
}

inline std::vector<AnalyzerSetting> unflatten(const std::vector<double> &x) {
    std::vector<AnalyzerSetting> s;
    for (std::size_t k = 0; k + 1 < x.size(); k += 2) s.push_back({x[k], x[k + 1]});
    return s;
}

/// Maximizes `f` from `canonical` and from `restarts` random starts.
inline std::pair<std::vector<AnalyzerSetting>, double> maximize_settings(
    const std::function<double(const std::vector<AnalyzerSetting> &)> &f, const std::vector<AnalyzerSetting> &canonical,
    SettingsMode mode, std::uint64_t seed, int restarts = 12) {
    double best = f(canonical);
    std::vector<AnalyzerSetting> best_s = canonical;
    if (mode == SettingsMode::canonical) return {best_s, best};
    auto objective = [&](const std::vector<double> &x) { return -f(unflatten(x)); };
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> theta(0.0, std::numbers::pi), phi(0.0, 2.0 * std::numbers::pi);
    NelderMeadOptions opt;
    opt.max_evaluations = 500;
    for (int r = 0; r <= restarts; ++r) {
        std::vector<double> x0;
        if (r == 0) {
            x0 = flatten(canonical);
        } else {
            for (std::size_t k = 0; k < canonical.size(); ++k) {
                x0.push_back(theta(rng));
                x0.push_back(phi(rng));
            }
        }
        OptimizeResult res = nelder_mead(objective, x0, opt);
        if (-res.value > best) {
            best = -res.value;
            best_s = unflatten(res.x);
        }
    }
    // Polish the winner with a fresh, smaller simplex.
    NelderMeadOptions polish;
    polish.initial_step = 0.05;
    polish.max_evaluations = 3000;
    OptimizeResult res = nelder_mead(objective, flatten(best_s), polish);
    if (-res.value > best) {
        best = -res.value;
        best_s = unflatten(res.x);
    }
    return {best_s, best};
}

inline double correlator(const QubitBlockView &view, const std::vector<LocalPovm> &povms, bool post_selected) {
    std::vector<CMatrix> values, gates;
    for (const auto &p : povms) {
        values.push_back(p.value());
        gates.push_back(p.conclusive());
    }
    std::vector<const CMatrix *> ops, gs;
    for (std::size_t q = 0; q < povms.size(); ++q) {
        ops.push_back(&values[q]);
        gs.push_back(&gates[q]);
    }
    const double e = view.expectation(ops);
    if (!post_selected) return e;
    const double n = view.expectation(gs);
    return n > 0.0 ? e / n : 0.0;
}

}  // namespace detail

/// Canonical CHSH analyzers (a, a', b, b') for (|HH> + |VV>)/sqrt2.
inline std::vector<AnalyzerSetting> canonical_chsh_settings() {
    const double pi = std::numbers::pi;
    return {{0.0, 0.0}, {pi / 2, 0.0}, {pi / 4, 0.0}, {-pi / 4, 0.0}};
}

/// Canonical CH analyzers: polarizer angles 0, 45, 22.5 and 67.5 degrees.
inline std::vector<AnalyzerSetting> canonical_ch_settings() {
    const double pi = std::numbers::pi;
    return {{0.0, 0.0}, {pi / 2, 0.0}, {pi / 4, 0.0}, {3 * pi / 4, 0.0}};
}

/// X and Y analyzers for each of three qubits.
inline std::vector<AnalyzerSetting> canonical_mermin_settings() {
    return {kAnalyzerX, kAnalyzerY, kAnalyzerX, kAnalyzerY, kAnalyzerX, kAnalyzerY};
}

/// S = E(a,b) + E(a,b') + E(a',b) - E(a',b') with +-1/0 valued outcomes.
inline double chsh_value(const QubitBlockView &view, const std::vector<AnalyzerSetting> &s, const DetectorModel &plus,
                         const DetectorModel &minus, bool post_selected) {
    const int dim = view.dim();
    std::vector<LocalPovm> p;
    for (const auto &a : s) p.push_back(analyzer_povm(a, plus, minus, dim));
    auto e = [&](std::size_t i, std::size_t j) { return detail::correlator(view, {p[i], p[j]}, post_selected); };
    return e(0, 2) + e(0, 3) + e(1, 2) - e(1, 3);
}

inline MetricResult chsh(const MixedState &rho, SettingsMode mode = SettingsMode::optimized, const DetectorModel &analyzer = DetectorModel::ideal_spd(),
                         bool post_selected = false, std::uint64_t seed = 1, std::optional<std::vector<AnalyzerSetting>> fixed = std::nullopt) {
    QubitBlockView view(rho);
    if (view.qubits() != 2) throw RegisterMismatch("chsh: expects two qubits");
    auto f = [&](const std::vector<AnalyzerSetting> &s) { return chsh_value(view, s, analyzer, analyzer, post_selected); };
    auto [s, v] = detail::maximize_settings(f, fixed.value_or(canonical_chsh_settings()), fixed ? SettingsMode::canonical : mode, seed);
    MetricResult r = make_result("chsh", v, 2.0, true);
    r.settings = MeasurementSetting{s, analyzer, analyzer, fixed ? SettingsMode::canonical : mode};
    return r;
}

/// CH = p(a,b) - p(a,b') + p(a',b) + p(a',b') - p(a') - p(b) from raw
/// plus-detector click probabilities.
inline double ch_expression(const QubitBlockView &view, const std::vector<AnalyzerSetting> &s, const DetectorModel &plus,
                            const DetectorModel &minus) {
    const int dim = view.dim();
    std::vector<CMatrix> click;
    for (const auto &a : s) click.push_back(analyzer_povm(a, plus, minus, dim).plus_click);
    const CMatrix id = CMatrix::Identity(static_cast<Eigen::Index>(dim) * dim, static_cast<Eigen::Index>(dim) * dim);
    auto p = [&](const CMatrix *x, const CMatrix *y) { return view.expectation({x, y}); };
    return p(&click[0], &click[2]) - p(&click[0], &click[3]) + p(&click[1], &click[2]) + p(&click[1], &click[3]) - p(&click[1], &id) -
           p(&id, &click[2]);
}

inline MetricResult ch_value(const MixedState &rho, SettingsMode mode = SettingsMode::optimized, const DetectorModel &analyzer = DetectorModel::ideal_spd(),
                             std::uint64_t seed = 1, std::optional<std::vector<AnalyzerSetting>> fixed = std::nullopt) {
    QubitBlockView view(rho);
    if (view.qubits() != 2) throw RegisterMismatch("ch_value: expects two qubits");
    auto f = [&](const std::vector<AnalyzerSetting> &s) { return ch_expression(view, s, analyzer, analyzer); };
    auto [s, v] = detail::maximize_settings(f, fixed.value_or(canonical_ch_settings()), fixed ? SettingsMode::canonical : mode, seed);
    MetricResult r = make_result("ch", v, 0.0, true);
    r.settings = MeasurementSetting{s, analyzer, analyzer, fixed ? SettingsMode::canonical : mode};
    return r;
}

/// M = <XXX> - <XYY> - <YXY> - <YYX>; settings are (X1, Y1, X2, Y2, X3, Y3).
inline double mermin_value(const QubitBlockView &view, const std::vector<AnalyzerSetting> &s, const DetectorModel &plus,
                           const DetectorModel &minus, bool post_selected) {
    const int dim = view.dim();
    std::vector<LocalPovm> p;
    for (const auto &a : s) p.push_back(analyzer_povm(a, plus, minus, dim));
    auto e = [&](int a, int b, int c) { return detail::correlator(view, {p[static_cast<std::size_t>(a)], p[static_cast<std::size_t>(2 + b)], p[static_cast<std::size_t>(4 + c)]}, post_selected); };
    return e(0, 0, 0) - e(0, 1, 1) - e(1, 0, 1) - e(1, 1, 0);
}

inline MetricResult mermin(const MixedState &rho, SettingsMode mode = SettingsMode::optimized, const DetectorModel &analyzer = DetectorModel::ideal_spd(),
                           bool post_selected = false, std::uint64_t seed = 1, std::optional<std::vector<AnalyzerSetting>> fixed = std::nullopt) {
    QubitBlockView view(rho);
    if (view.qubits() != 3) throw RegisterMismatch("mermin: expects three qubits");
    auto f = [&](const std::vector<AnalyzerSetting> &s) { return mermin_value(view, s, analyzer, analyzer, post_selected); };
    auto [s, v] = detail::maximize_settings(f, fixed.value_or(canonical_mermin_settings()), fixed ? SettingsMode::canonical : mode, seed);
    MetricResult r = make_result("mermin", v, 2.0, true);
    r.settings = MeasurementSetting{s, analyzer, analyzer, fixed ? SettingsMode::canonical : mode};
    return r;
}

// ---------------------------------------------------------------------------
// Circuit-level evaluation.

enum class MetricId { witness, chsh, ch, mermin };

inline std::string to_string(MetricId m) {
    switch (m) {
        case MetricId::witness:
            return "witness";
        case MetricId::chsh:
            return "chsh";
        case MetricId::ch:
            return "ch";
        case MetricId::mermin:
            return "mermin";
    }
    return "?";
}

inline MetricId metric_from_string(const std::string &s) {
    if (s == "witness") return MetricId::witness;
    if (s == "chsh") return MetricId::chsh;
    if (s == "ch") return MetricId::ch;
    if (s == "mermin") return MetricId::mermin;
    throw ValidationError("unknown metric '" + s + "'");
}

inline bool metric_applies(MetricId m, CircuitId c) {
    const std::size_t nq = qubit_count(c);
    if (m == MetricId::witness) return true;
    if (m == MetricId::mermin) return nq == 3;
    return nq == 2;
}

/// Evaluates `metric` on a circuit output with the "analyzer" detectors of
/// `devices`. Post-selected circuits use conclusive-event renormalization.
inline MetricResult evaluate_metric(MetricId metric, const CircuitOutput &out, const DeviceMap &devices, SettingsMode mode,
                                    std::uint64_t seed) {
    if (!metric_applies(metric, out.circuit)) {
        throw ValidationError("metric '" + to_string(metric) + "' does not apply to circuit '" + to_string(out.circuit) + "'");
    }
    const bool ps = is_post_selected(out.circuit);
    const bool three = qubit_count(out.circuit) == 3;
    const std::string name = metric == MetricId::witness ? (three ? "ghz_witness" : "bell_witness") : to_string(metric);
    const bool above = metric != MetricId::witness;
    const double bound = metric == MetricId::witness || metric == MetricId::ch ? 0.0 : 2.0;
    if (out.empty()) return make_result(name, std::numeric_limits<double>::quiet_NaN(), bound, above);
    const DetectorModel &an = device_for(devices, "analyzer");
    switch (metric) {
        case MetricId::witness:
            return three ? ghz_witness(*out.state, ps) : bell_witness(*out.state, ps);
        case MetricId::chsh:
            return chsh(*out.state, mode, an, ps, seed);
        case MetricId::ch:
            return ch_value(*out.state, mode, an, seed);
        case MetricId::mermin:
            return mermin(*out.state, mode, an, ps, seed);
    }
    throw std::logic_error("unreachable");
}

// ---------------------------------------------------------------------------
// Threshold scan.

struct ThresholdScanOptions {
    double omega_tolerance = 1e-3;
    int max_iterations = 40;
    /// Upper end of the scanned g2 range.
    double g2_max = 1.0;
};

struct ScanPoint {
    double omega = 0.0;
    double g2 = 0.0;
    double value = 0.0;
    double margin = 0.0;
};

enum class ThresholdStatus { found, no_violation, above_range };

inline std::string to_string(ThresholdStatus s) {
    switch (s) {
        case ThresholdStatus::found:
            return "threshold";
        case ThresholdStatus::no_violation:
            return "no-threshold";
        case ThresholdStatus::above_range:
            return "above-range";
    }
    return "?";
}

struct ThresholdResult {
    ThresholdStatus status = ThresholdStatus::no_violation;
    double p_hrld = 0.0;
    /// g2 and omega at the midpoint of the final bracket (status found).
    double g2 = std::numeric_limits<double>::quiet_NaN();
    double omega = std::numeric_limits<double>::quiet_NaN();
    /// Violating side of the bracket and the non-violating side.
    ScanPoint lower;
    ScanPoint upper;
    std::optional<MeasurementSetting> settings;
    std::vector<ScanPoint> evaluations;
    /// Whether every evaluation agreed with a margin that falls as omega grows.
    bool monotone = true;
    int iterations = 0;
};

/// Bisects omega at fixed P_hrld = eps^2 until `metric` stops being
/// violated. The scanned range is omega in [0, omega_max] where
/// g2(omega_max) = options.g2_max (or omega_max = 1).
inline ThresholdResult threshold_scan(double p_hrld, const std::function<MetricResult(const SourceSpec &)> &metric,
                                      const ThresholdScanOptions &options = {}) {
    if (!(p_hrld > 0.0 && p_hrld <= 1.0)) throw ValidationError("threshold_scan: P_hrld must lie in (0, 1]");
    ThresholdResult res;
    res.p_hrld = p_hrld;
    const double eps = std::sqrt(p_hrld);
    const double omega_max = 2.0 * options.g2_max * p_hrld >= 1.0 ? 1.0 : source_from_targets(p_hrld, options.g2_max).omega;
    std::optional<MeasurementSetting> last_violating_settings;
    auto eval = [&](double omega) {
        SourceSpec s{eps, omega};
        MetricResult m = metric(s);
        ScanPoint p{omega, s.g2(), m.value, m.margin()};
        res.evaluations.push_back(p);
        if (m.violated) last_violating_settings = m.settings;
        return p;
    };
    ScanPoint lo = eval(0.0);
    if (!(lo.margin > 0.0)) {
        res.status = ThresholdStatus::no_violation;
        res.lower = res.upper = lo;
        return res;
    }
    ScanPoint hi = eval(omega_max);
    if (hi.margin > 0.0) {
        res.status = ThresholdStatus::above_range;
        res.lower = res.upper = hi;
        res.settings = last_violating_settings;
        return res;
    }
    while (hi.omega - lo.omega > options.omega_tolerance && res.iterations < options.max_iterations) {
        ++res.iterations;
        ScanPoint mid = eval(0.5 * (lo.omega + hi.omega));
        (mid.margin > 0.0 ? lo : hi) = mid;
    }
    res.status = ThresholdStatus::found;
    res.lower = lo;
    res.upper = hi;
    res.omega = 0.5 * (lo.omega + hi.omega);
    res.g2 = SourceSpec{eps, res.omega}.g2();
    res.settings = last_violating_settings;
    auto sorted = res.evaluations;
    std::sort(sorted.begin(), sorted.end(), [](const ScanPoint &a, const ScanPoint &b) { return a.omega < b.omega; });
    for (std::size_t k = 1; k < sorted.size(); ++k) {
        if (sorted[k].margin > sorted[k - 1].margin + 1e-9) res.monotone = false;
    }
    return res;
}

/// threshold_scan for one of the bundled circuits.
inline ThresholdResult circuit_threshold(CircuitId circuit, MetricId metric, double p_hrld, const CircuitConditions &conditions, int dim,
                                         SettingsMode mode, std::uint64_t seed, const ThresholdScanOptions &options = {}) {
    return threshold_scan(
        p_hrld,
        [&](const SourceSpec &s) {
            return evaluate_metric(metric, run_circuit(circuit, s, conditions.devices, dim, conditions.options), conditions.devices, mode, seed);
        },
        options);
}

}  // namespace fockbench
