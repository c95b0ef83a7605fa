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

// Core operations on truncated multi-mode Fock states: construction, tensor
// composition, Hamiltonian evolution, expectation values, partial traces and
// conditioning on a diagonal detector element.

#pragma once

#include <numeric>
#include <optional>
#include <variant>

#include "fockbench/operators.hpp"
#include "fockbench/states.hpp"

namespace fockbench {

/// Raised when `tensor` receives a mix of states and operators.
class KindMismatch : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

inline PureState number_state(const FockSpace &space, int photons) {
    if (photons < 0 || photons >= space.dim()) {
        throw std::out_of_range("number_state: " + std::to_string(photons) + " photons exceed truncation dim " +
                                std::to_string(space.dim()));
    }
    CVector v = CVector::Zero(space.dim());
    v(photons) = 1.0;
    return PureState(ModeRegister({space}), std::move(v));
}

/// Product state with the given photon number in each mode of `reg`.
inline PureState fock_state(const ModeRegister &reg, std::span<const int> occupation) {
    CVector v = CVector::Zero(static_cast<Eigen::Index>(reg.joint_dim()));
    v(static_cast<Eigen::Index>(reg.index(occupation))) = 1.0;
    return PureState(reg, std::move(v));
}

inline PureState vacuum(const ModeRegister &reg) {
    std::vector<int> zeros(reg.size(), 0);
    return fock_state(reg, zeros);
}

// ---------------------------------------------------------------------------
// Tensor products (left-to-right mode order).

inline PureState tensor(std::span<const PureState> parts) {
    if (parts.empty()) throw ValidationError("tensor: no parts");
    ModeRegister reg = parts[0].reg();
    CVector v = parts[0].amplitudes();
    for (std::size_t k = 1; k < parts.size(); ++k) {
        const CVector &b = parts[k].amplitudes();
        CVector out(v.size() * b.size());
        for (Eigen::Index i = 0; i < v.size(); ++i) out.segment(i * b.size(), b.size()) = v(i) * b;
        v = std::move(out);
        reg = reg.concat(parts[k].reg());
    }
    return PureState(std::move(reg), std::move(v));
}

inline PureState tensor(std::initializer_list<PureState> parts) {
    std::vector<PureState> v(parts);
    return tensor(std::span<const PureState>(v));
}

inline FockOperator tensor(std::span<const FockOperator> parts) {
    if (parts.empty()) throw ValidationError("tensor: no parts");
    ModeRegister reg = parts[0].reg();
    CMatrix m = parts[0].matrix();
    OperatorFlags flags = parts[0].flags();
    for (std::size_t k = 1; k < parts.size(); ++k) {
        m = kron(m, parts[k].matrix());
        reg = reg.concat(parts[k].reg());
        flags.unitary = flags.unitary && parts[k].flags().unitary;
        flags.hermitian = flags.hermitian && parts[k].flags().hermitian;
        flags.diagonal = flags.diagonal && parts[k].flags().diagonal;
    }
    return FockOperator(std::move(reg), std::move(m), flags);
}

inline FockOperator tensor(std::initializer_list<FockOperator> parts) {
    std::vector<FockOperator> v(parts);
    return tensor(std::span<const FockOperator>(v));
}

inline MixedState tensor(std::span<const MixedState> parts) {
    if (parts.empty()) throw ValidationError("tensor: no parts");
    bool all_diag = std::all_of(parts.begin(), parts.end(), [](const MixedState &s) { return s.is_diagonal(); });
    ModeRegister reg = parts[0].reg();
    if (all_diag) {
        std::vector<DiagonalTerm> terms = parts[0].terms();
        for (std::size_t k = 1; k < parts.size(); ++k) {
            const std::size_t d = parts[k].reg().joint_dim();
            std::vector<DiagonalTerm> next;
            next.reserve(terms.size() * parts[k].terms().size());
            for (const auto &a : terms) {
                for (const auto &b : parts[k].terms()) next.push_back({a.weight * b.weight, a.index * d + b.index});
            }
            terms = std::move(next);
            reg = reg.concat(parts[k].reg());
        }
        return MixedState::diagonal(std::move(reg), std::move(terms));
    }
    CMatrix m = parts[0].density();
    for (std::size_t k = 1; k < parts.size(); ++k) {
        m = kron(m, parts[k].density());
        reg = reg.concat(parts[k].reg());
    }
    return MixedState::from_density(std::move(reg), std::move(m));
}

inline MixedState tensor(std::initializer_list<MixedState> parts) {
    std::vector<MixedState> v(parts);
    return tensor(std::span<const MixedState>(v));
}

using FockObject = std::variant<PureState, FockOperator>;

/// Runtime-typed tensor; all parts must be the same kind.
inline FockObject tensor(std::span<const FockObject> parts) {
    if (parts.empty()) throw ValidationError("tensor: no parts");
    if (std::holds_alternative<PureState>(parts[0])) {
        std::vector<PureState> states;
        for (const auto &p : parts) {
            if (!std::holds_alternative<PureState>(p)) throw KindMismatch("tensor: cannot mix states and operators");
            states.push_back(std::get<PureState>(p));
        }
        return tensor(std::span<const PureState>(states));
    }
    std::vector<FockOperator> ops;
    for (const auto &p : parts) {
        if (!std::holds_alternative<FockOperator>(p)) throw KindMismatch("tensor: cannot mix states and operators");
        ops.push_back(std::get<FockOperator>(p));
    }
    return tensor(std::span<const FockOperator>(ops));
}

// ---------------------------------------------------------------------------
// Hamiltonian evolution.

namespace detail {

/// Groups basis indices into connected components of the nonzero pattern of
/// `h`. Any Hermitian matrix is block diagonal over these components.
inline std::vector<std::vector<Eigen::Index>> coupled_blocks(const CMatrix &h) {
    const Eigen::Index n = h.rows();
    std::vector<Eigen::Index> parent(static_cast<std::size_t>(n));
    std::iota(parent.begin(), parent.end(), Eigen::Index{0});
    auto find = [&](Eigen::Index x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            x = parent[static_cast<std::size_t>(x)];
        }
        return x;
    };
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
            if (i != j && h(i, j) != Complex(0.0)) {
                Eigen::Index a = find(i), b = find(j);
                if (a != b) parent[static_cast<std::size_t>(a)] = b;
            }
        }
    }
    std::vector<std::vector<Eigen::Index>> blocks;
    std::vector<Eigen::Index> slot(static_cast<std::size_t>(n), -1);
    for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::Index r = find(i);
        if (slot[static_cast<std::size_t>(r)] < 0) {
            slot[static_cast<std::size_t>(r)] = static_cast<Eigen::Index>(blocks.size());
            blocks.emplace_back();
        }
        blocks[static_cast<std::size_t>(slot[static_cast<std::size_t>(r)])].push_back(i);
    }
    return blocks;
}

/// exp(-i * scale * h) for Hermitian h via eigendecomposition of each
/// coupled block.
inline CMatrix hermitian_exponential(const CMatrix &h, double scale) {
    const Eigen::Index n = h.rows();
    CMatrix u = CMatrix::Zero(n, n);
    for (const auto &block : coupled_blocks(h)) {
        const auto b = static_cast<Eigen::Index>(block.size());
        CMatrix sub(b, b);
        for (Eigen::Index r = 0; r < b; ++r) {
            for (Eigen::Index c = 0; c < b; ++c) sub(r, c) = h(block[static_cast<std::size_t>(r)], block[static_cast<std::size_t>(c)]);
        }
        CMatrix ub;
        if (b == 1) {
            ub = CMatrix::Constant(1, 1, std::exp(Complex(0.0, -scale * sub(0, 0).real())));
        } else {
            Eigen::SelfAdjointEigenSolver<CMatrix> es(sub);
            CVector phases = (es.eigenvalues().cast<Complex>() * Complex(0.0, -scale)).array().exp();
            ub = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
        }
        for (Eigen::Index r = 0; r < b; ++r) {
            for (Eigen::Index c = 0; c < b; ++c) u(block[static_cast<std::size_t>(r)], block[static_cast<std::size_t>(c)]) = ub(r, c);
        }
    }
    return u;
}

}  // namespace detail

/// Returns exp(-i * scale * H), computed from the eigendecomposition of the
/// Hermitian H, so the result is exactly unitary on the truncated space.
inline FockOperator evolve_hamiltonian(const FockOperator &hamiltonian, double scale = 1.0) {
    if (hermiticity_defect(hamiltonian.matrix()) > kAlgebraicTol) {
        throw ValidationError("evolve_hamiltonian: Hamiltonian is not Hermitian");
    }
    CMatrix h = 0.5 * (hamiltonian.matrix() + hamiltonian.matrix().adjoint());
    return FockOperator(hamiltonian.reg(), detail::hermitian_exponential(h, scale), {true, false, false});
}

// ---------------------------------------------------------------------------
// Expectation values.

namespace detail {
inline Complex clean_expectation(Complex value, const FockOperator &op) {
    if (op.flags().hermitian && std::abs(value.imag()) < kAlgebraicTol) return {value.real(), 0.0};
    return value;
}
}  // namespace detail

inline Complex expectation(const FockOperator &op, const PureState &state) {
    require_same_register(op.reg(), state.reg(), "expectation");
    const CVector &psi = state.amplitudes();
    return detail::clean_expectation(psi.dot(op.matrix() * psi), op);
}

inline Complex expectation(const FockOperator &op, const MixedState &state) {
    require_same_register(op.reg(), state.reg(), "expectation");
    Complex value = 0.0;
    if (state.is_diagonal()) {
        for (const auto &t : state.terms()) {
            auto i = static_cast<Eigen::Index>(t.index);
            value += t.weight * op(i, i);
        }
    } else {
        value = (op.matrix().transpose().cwiseProduct(state.dense())).sum();
    }
    return detail::clean_expectation(value, op);
}

/// Real part of an expectation; throws when the imaginary residue exceeds
/// kAlgebraicTol.
template <typename State>
double real_expectation(const FockOperator &op, const State &state) {
    Complex v = expectation(op, state);
    if (std::abs(v.imag()) > kAlgebraicTol) throw ValidationError("expectation value has an imaginary part");
    return v.real();
}

// ---------------------------------------------------------------------------
// Partial trace and conditioning.

namespace detail {

struct TraceSplit {
    ModeRegister kept;
    std::vector<std::size_t> kept_index;    // per full index
    std::vector<std::size_t> traced_index;  // per full index
    std::size_t traced_dim = 1;
};

inline TraceSplit split_register(const ModeRegister &reg, std::span<const std::size_t> keep) {
    if (keep.empty()) throw ValidationError("partial_trace: keep set is empty");
    std::vector<bool> is_kept(reg.size(), false);
    for (std::size_t k : keep) {
        if (k >= reg.size()) throw std::out_of_range("partial_trace: mode index outside register");
        if (is_kept[k]) throw ValidationError("partial_trace: duplicate mode in keep set");
        is_kept[k] = true;
    }
    std::vector<std::size_t> traced;
    for (std::size_t k = 0; k < reg.size(); ++k) {
        if (!is_kept[k]) traced.push_back(k);
    }
    TraceSplit s{reg.subset(keep), {}, {}, 1};
    ModeRegister traced_reg = reg.subset(traced);
    s.traced_dim = traced_reg.joint_dim();
    const std::size_t n = reg.joint_dim();
    s.kept_index.resize(n);
    s.traced_index.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t ki = 0, ti = 0;
        for (std::size_t p = 0; p < keep.size(); ++p) ki += static_cast<std::size_t>(reg.photons_in(i, keep[p])) * s.kept.stride(p);
        for (std::size_t p = 0; p < traced.size(); ++p) ti += static_cast<std::size_t>(reg.photons_in(i, traced[p])) * traced_reg.stride(p);
        s.kept_index[i] = ki;
        s.traced_index[i] = ti;
    }
    return s;
}

/// Tr_traced[(W (x) I) rho] where W is diagonal on the traced modes with
/// entries `traced_weight[ti]` (all ones for a plain partial trace).
inline MixedState weighted_trace(const MixedState &state, const TraceSplit &s, const std::vector<double> &traced_weight) {
    const std::size_t n = state.reg().joint_dim();
    if (state.is_diagonal()) {
        std::vector<DiagonalTerm> out;
        for (const auto &t : state.terms()) {
            double w = traced_weight[s.traced_index[t.index]];
            if (w != 0.0) out.push_back({t.weight * w, s.kept_index[t.index]});
        }
        return MixedState::diagonal(s.kept, std::move(out));
    }
    std::vector<std::vector<std::size_t>> groups(s.traced_dim);
    for (std::size_t i = 0; i < n; ++i) groups[s.traced_index[i]].push_back(i);
    const CMatrix &rho = state.dense();
    const auto kd = static_cast<Eigen::Index>(s.kept.joint_dim());
    CMatrix out = CMatrix::Zero(kd, kd);
    for (std::size_t t = 0; t < s.traced_dim; ++t) {
        double w = traced_weight[t];
        if (w == 0.0) continue;
        for (std::size_t i : groups[t]) {
            for (std::size_t j : groups[t]) {
                out(static_cast<Eigen::Index>(s.kept_index[i]), static_cast<Eigen::Index>(s.kept_index[j])) +=
                    w * rho(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            }
        }
    }
    return MixedState::from_density(s.kept, std::move(out));
}

}  // namespace detail

/// Reduced density operator on `keep` (output modes in the order given).
inline MixedState partial_trace(const MixedState &state, std::span<const std::size_t> keep) {
    auto split = detail::split_register(state.reg(), keep);
    return detail::weighted_trace(state, split, std::vector<double>(split.traced_dim, 1.0));
}

inline MixedState partial_trace(const MixedState &state, std::initializer_list<std::size_t> keep) {
    std::vector<std::size_t> k(keep);
    return partial_trace(state, std::span<const std::size_t>(k));
}

inline MixedState partial_trace(const PureState &state, std::span<const std::size_t> keep) {
    auto split = detail::split_register(state.reg(), keep);
    const auto kd = static_cast<Eigen::Index>(split.kept.joint_dim());
    CMatrix psi = CMatrix::Zero(static_cast<Eigen::Index>(split.traced_dim), kd);
    const CVector &a = state.amplitudes();
    for (std::size_t i = 0; i < state.reg().joint_dim(); ++i) {
        psi(static_cast<Eigen::Index>(split.traced_index[i]), static_cast<Eigen::Index>(split.kept_index[i])) = a(static_cast<Eigen::Index>(i));
    }
    return MixedState::from_density(split.kept, psi.transpose() * psi.conjugate());
}

inline MixedState partial_trace(const PureState &state, std::initializer_list<std::size_t> keep) {
    std::vector<std::size_t> k(keep);
    return partial_trace(state, std::span<const std::size_t>(k));
}

/// Reorders modes: output mode p is input mode `order[p]`.
inline MixedState permute_modes(const MixedState &state, std::span<const std::size_t> order) {
    if (order.size() != state.reg().size()) throw ValidationError("permute_modes: order must name every mode");
    return partial_trace(state, order);
}

struct MeasurementOutcome {
    double probability = 0.0;
    /// Normalized state of the remaining modes; empty when the outcome has
    /// zero probability.
    std::optional<MixedState> conditional;
    bool empty() const { return !conditional.has_value(); }
};

/// Applies the diagonal POVM element `detector` to `mode`, traces that mode
/// out and renormalizes.
inline MeasurementOutcome measure_and_condition(const MixedState &state, const FockOperator &detector, std::size_t mode) {
    if (mode >= state.reg().size()) throw std::out_of_range("measure_and_condition: mode outside register");
    if (!detector.flags().diagonal) throw ValidationError("measure_and_condition: detector operator must be diagonal");
    if (detector.reg().size() != 1 || detector.reg().dim(0) != state.reg().dim(mode)) {
        throw RegisterMismatch("measure_and_condition: detector does not match the measured mode");
    }
    std::vector<double> weight(static_cast<std::size_t>(detector.reg().dim(0)));
    for (std::size_t n = 0; n < weight.size(); ++n) {
        Complex e = detector(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
        if (std::abs(e.imag()) > 0.0 || e.real() < 0.0 || e.real() > 1.0) {
            throw ValidationError("measure_and_condition: detector entries must lie in [0, 1]");
        }
        weight[n] = e.real();
    }
    if (state.reg().size() == 1) {
        double p = 0.0;
        Eigen::VectorXd pop = state.populations();
        for (std::size_t n = 0; n < weight.size(); ++n) p += weight[n] * pop(static_cast<Eigen::Index>(n));
        return {p, std::nullopt};
    }
    std::vector<std::size_t> keep;
    for (std::size_t k = 0; k < state.reg().size(); ++k) {
        if (k != mode) keep.push_back(k);
    }
    auto split = detail::split_register(state.reg(), keep);
    MixedState unnormalized = detail::weighted_trace(state, split, weight);
    double p = unnormalized.trace();
    if (!(p > 0.0)) return {0.0, std::nullopt};
    return {p, unnormalized.scaled(1.0 / p)};
}

inline MeasurementOutcome measure_and_condition(const PureState &state, const FockOperator &detector, std::size_t mode) {
    return measure_and_condition(MixedState::from_pure(state), detector, mode);
}

/// Applies K (acting on `modes`, in that order) as K rho K^dag.
inline MixedState apply_local(const MixedState &state, const CMatrix &local, std::span<const std::size_t> modes) {
    const ModeRegister &reg = state.reg();
    ModeRegister sub = reg.subset(modes);
    if (local.rows() != static_cast<Eigen::Index>(sub.joint_dim()) || local.cols() != local.rows()) {
        throw RegisterMismatch("apply_local: operator shape does not match the selected modes");
    }
    auto split = detail::split_register(reg, modes);
    const std::size_t n = reg.joint_dim();
    const auto ld = static_cast<Eigen::Index>(sub.joint_dim());
    // full index for (traced part, local index)
    std::vector<std::size_t> base(split.traced_dim, 0);
    std::vector<std::size_t> local_offset(static_cast<std::size_t>(ld), 0);
    for (std::size_t i = 0; i < n; ++i) {
        if (split.kept_index[i] == 0) base[split.traced_index[i]] = i;
        if (split.traced_index[i] == 0) local_offset[split.kept_index[i]] = i;
    }
    CMatrix embedded = CMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t t = 0; t < split.traced_dim; ++t) {
        for (Eigen::Index r = 0; r < ld; ++r) {
            for (Eigen::Index c = 0; c < ld; ++c) {
                if (local(r, c) == Complex(0.0)) continue;
                embedded(static_cast<Eigen::Index>(base[t] + local_offset[static_cast<std::size_t>(r)]),
                         static_cast<Eigen::Index>(base[t] + local_offset[static_cast<std::size_t>(c)])) = local(r, c);
            }
        }
    }
    CMatrix rho = state.density();
    return MixedState::from_density(reg, embedded * rho * embedded.adjoint());
}

}  // namespace fockbench
