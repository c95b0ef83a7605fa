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

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Eigenvalues>

#include "fockbench/fock_space.hpp"

namespace fockbench {

/// Amplitude vector over the joint Fock basis of a register.
class PureState {
   public:
    PureState(ModeRegister reg, CVector amplitudes) : reg_(std::move(reg)), amps_(std::move(amplitudes)) {
        if (static_cast<std::size_t>(amps_.size()) != reg_.joint_dim()) {
            throw RegisterMismatch("amplitude vector length does not match register joint dimension");
        }
    }

    const ModeRegister &reg() const { return reg_; }
    const CVector &amplitudes() const { return amps_; }
    Complex amplitude(std::span<const int> occupation) const { return amps_(reg_.index(occupation)); }
    double norm() const { return amps_.norm(); }

    PureState normalized() const {
        double n = norm();
        if (n == 0.0) throw ValidationError("cannot normalize the zero vector");
        return PureState(reg_, amps_ / n);
    }

   private:
    ModeRegister reg_;
    CVector amps_;
};

/// One weighted photon-number projector |k><k| of a diagonal mixture.
struct DiagonalTerm {
    double weight = 0.0;
    std::size_t index = 0;
};

/// Density operator. Either a full matrix or a weighted list of joint
/// number-basis projectors; the second form is what heralding produces and
/// keeps large single-mode mixtures cheap.
class MixedState {
   public:
    static MixedState from_density(ModeRegister reg, CMatrix rho) {
        if (static_cast<std::size_t>(rho.rows()) != reg.joint_dim() || rho.rows() != rho.cols()) {
            throw RegisterMismatch("density matrix shape does not match register joint dimension");
        }
        return MixedState(std::move(reg), Storage(std::move(rho)));
    }

    static MixedState from_pure(const PureState &psi) {
        const CVector &a = psi.amplitudes();
        return from_density(psi.reg(), a * a.adjoint());
    }

    static MixedState diagonal(ModeRegister reg, std::vector<DiagonalTerm> terms) {
        std::map<std::size_t, double> merged;
        for (const auto &t : terms) {
            if (t.index >= reg.joint_dim()) throw std::out_of_range("diagonal term index outside register");
            merged[t.index] += t.weight;
        }
        std::vector<DiagonalTerm> compact;
        compact.reserve(merged.size());
        for (auto [idx, w] : merged) {
            if (w != 0.0) compact.push_back({w, idx});
        }
        return MixedState(std::move(reg), Storage(std::move(compact)));
    }

    const ModeRegister &reg() const { return reg_; }
    bool is_diagonal() const { return std::holds_alternative<std::vector<DiagonalTerm>>(storage_); }

    const std::vector<DiagonalTerm> &terms() const {
        if (!is_diagonal()) throw std::logic_error("MixedState is not a diagonal mixture");
        return std::get<std::vector<DiagonalTerm>>(storage_);
    }

    /// Full density matrix, materialized from the diagonal form when needed.
    CMatrix density() const {
        if (!is_diagonal()) return std::get<CMatrix>(storage_);
        const auto n = static_cast<Eigen::Index>(reg_.joint_dim());
        CMatrix rho = CMatrix::Zero(n, n);
        for (const auto &t : terms()) rho(static_cast<Eigen::Index>(t.index), static_cast<Eigen::Index>(t.index)) += t.weight;
        return rho;
    }

    const CMatrix &dense() const {
        if (is_diagonal()) throw std::logic_error("MixedState holds a diagonal mixture");
        return std::get<CMatrix>(storage_);
    }

    /// Diagonal of the density operator (number-basis populations).
    Eigen::VectorXd populations() const {
        Eigen::VectorXd p = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(reg_.joint_dim()));
        if (is_diagonal()) {
            for (const auto &t : terms()) p(static_cast<Eigen::Index>(t.index)) += t.weight;
        } else {
            p = dense().diagonal().real();
        }
        return p;
    }

    double trace() const {
        if (is_diagonal()) {
            double s = 0.0;
            for (const auto &t : terms()) s += t.weight;
            return s;
        }
        return dense().trace().real();
    }

    MixedState scaled(double factor) const {
        if (is_diagonal()) {
            auto t = terms();
            for (auto &x : t) x.weight *= factor;
            return MixedState(reg_, Storage(std::move(t)));
        }
        return MixedState(reg_, Storage(CMatrix(dense() * factor)));
    }

    MixedState normalized() const {
        double tr = trace();
        if (!(tr > 0.0)) throw ValidationError("cannot normalize a state with non-positive trace");
        return scaled(1.0 / tr);
    }

    MixedState to_dense() const { return is_diagonal() ? from_density(reg_, density()) : *this; }

    /// Checks trace, hermiticity and positivity within `tol`; throws on failure.
    void validate(double tol = kAlgebraicTol) const {
        if (std::abs(trace() - 1.0) > tol) throw ValidationError("state trace differs from 1");
        if (is_diagonal()) {
            for (const auto &t : terms()) {
                if (t.weight < -tol) throw ValidationError("negative weight in diagonal mixture");
            }
            return;
        }
        const CMatrix &rho = dense();
        if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > tol) throw ValidationError("density matrix is not Hermitian");
        Eigen::SelfAdjointEigenSolver<CMatrix> es(rho, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -tol) throw ValidationError("density matrix has a negative eigenvalue");
    }

    /// Decomposition into weighted pure components; eigenvalues below
    /// `cutoff` are dropped.
    std::vector<std::pair<double, CVector>> ensemble(double cutoff = 1e-15) const {
        std::vector<std::pair<double, CVector>> out;
        const auto n = static_cast<Eigen::Index>(reg_.joint_dim());
        if (is_diagonal()) {
            for (const auto &t : terms()) {
                if (t.weight <= cutoff) continue;
                CVector v = CVector::Zero(n);
                v(static_cast<Eigen::Index>(t.index)) = 1.0;
                out.emplace_back(t.weight, std::move(v));
            }
            return out;
        }
        const CMatrix &rho = dense();
        // Diagonal density matrices are common (dephased sources); skip the solver.
        CMatrix off = rho;
        off.diagonal().setZero();
        if (off.cwiseAbs().maxCoeff() == 0.0) {
            for (Eigen::Index i = 0; i < n; ++i) {
                double w = rho(i, i).real();
                if (w <= cutoff) continue;
                CVector v = CVector::Zero(n);
                v(i) = 1.0;
                out.emplace_back(w, std::move(v));
            }
            return out;
        }
        Eigen::SelfAdjointEigenSolver<CMatrix> es(rho);
        for (Eigen::Index k = 0; k < n; ++k) {
            double w = es.eigenvalues()(k);
            if (w <= cutoff) continue;
            out.emplace_back(w, es.eigenvectors().col(k));
        }
        return out;
    }

   private:
    using Storage = std::variant<CMatrix, std::vector<DiagonalTerm>>;
    MixedState(ModeRegister reg, Storage storage) : reg_(std::move(reg)), storage_(std::move(storage)) {}

    ModeRegister reg_;
    Storage storage_;
};

}  // namespace fockbench
