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

#include <cmath>
#include <string>

#include "fockbench/fock_space.hpp"

namespace fockbench {

struct OperatorFlags {
    bool unitary = false;
    bool hermitian = false;
    bool diagonal = false;
};

inline CMatrix kron(const CMatrix &a, const CMatrix &b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

inline double unitarity_defect(const CMatrix &u) {
    return (u.adjoint() * u - CMatrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
}

inline double hermiticity_defect(const CMatrix &h) { return (h - h.adjoint()).cwiseAbs().maxCoeff(); }

/// Dense complex matrix on the joint space of a register. Flags are checked
/// on construction: a unitary flag needs U^dag U = I within kAlgebraicTol, a
/// diagonal flag needs exactly zero off-diagonal entries.
class FockOperator {
   public:
    FockOperator(ModeRegister reg, CMatrix matrix, OperatorFlags flags = {})
        : reg_(std::move(reg)), m_(std::move(matrix)), flags_(flags) {
        const auto n = static_cast<Eigen::Index>(reg_.joint_dim());
        if (m_.rows() != n || m_.cols() != n) {
            throw RegisterMismatch("operator shape does not match register joint dimension");
        }
        if (flags_.diagonal) {
            CMatrix off = m_;
            off.diagonal().setZero();
            if (off.cwiseAbs().maxCoeff() != 0.0) throw ValidationError("operator flagged diagonal has off-diagonal entries");
        }
        if (flags_.hermitian && hermiticity_defect(m_) > kAlgebraicTol) {
            throw ValidationError("operator flagged Hermitian is not Hermitian");
        }
        if (flags_.unitary && unitarity_defect(m_) > kAlgebraicTol) {
            throw ValidationError("operator flagged unitary is not unitary");
        }
    }

    static FockOperator identity(const ModeRegister &reg) {
        const auto n = static_cast<Eigen::Index>(reg.joint_dim());
        return FockOperator(reg, CMatrix::Identity(n, n), {true, true, true});
    }

    static FockOperator from_diagonal(const ModeRegister &reg, const Eigen::VectorXd &diag) {
        CMatrix m = CMatrix::Zero(diag.size(), diag.size());
        m.diagonal() = diag.cast<Complex>();
        return FockOperator(reg, std::move(m), {false, true, true});
    }

    const ModeRegister &reg() const { return reg_; }
    const CMatrix &matrix() const { return m_; }
    const OperatorFlags &flags() const { return flags_; }
    Complex operator()(Eigen::Index row, Eigen::Index col) const { return m_(row, col); }

    FockOperator adjoint() const {
        return FockOperator(reg_, m_.adjoint(), {flags_.unitary, flags_.hermitian, flags_.diagonal});
    }

    FockOperator operator*(const FockOperator &rhs) const {
        require_same_register(reg_, rhs.reg_, "operator product");
        return FockOperator(reg_, m_ * rhs.m_, {flags_.unitary && rhs.flags_.unitary, false,
                                                 flags_.diagonal && rhs.flags_.diagonal});
    }

    FockOperator operator+(const FockOperator &rhs) const {
        require_same_register(reg_, rhs.reg_, "operator sum");
        return FockOperator(reg_, m_ + rhs.m_, {false, flags_.hermitian && rhs.flags_.hermitian,
                                                 flags_.diagonal && rhs.flags_.diagonal});
    }

    FockOperator scaled(double factor) const {
        return FockOperator(reg_, m_ * factor, {false, flags_.hermitian, flags_.diagonal});
    }

   private:
    ModeRegister reg_;
    CMatrix m_;
    OperatorFlags flags_;
};

/// Truncated annihilation operator: a|n> = sqrt(n)|n-1>.
inline FockOperator annihilation(const FockSpace &space) {
    const int n = space.dim();
    CMatrix a = CMatrix::Zero(n, n);
    for (int k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
    return FockOperator(ModeRegister({space}), std::move(a));
}

inline FockOperator creation(const FockSpace &space) { return annihilation(space).adjoint(); }

inline FockOperator number_operator(const FockSpace &space) {
    Eigen::VectorXd d(space.dim());
    for (int k = 0; k < space.dim(); ++k) d(k) = k;
    return FockOperator::from_diagonal(ModeRegister({space}), d);
}

/// Lifts a single-mode operator to `mode` of `reg` (identity elsewhere).
inline FockOperator embed(const FockOperator &local, const ModeRegister &reg, std::size_t mode) {
    if (local.reg().size() != 1 || local.reg().dim(0) != reg.dim(mode)) {
        throw RegisterMismatch("embed: local operator does not act on a mode of matching dimension");
    }
    CMatrix out = CMatrix::Identity(1, 1);
    for (std::size_t k = 0; k < reg.size(); ++k) {
        if (k == mode) {
            out = kron(out, local.matrix());
        } else {
            out = kron(out, CMatrix::Identity(reg.dim(k), reg.dim(k)));
        }
    }
    return FockOperator(reg, std::move(out), {local.flags().unitary, local.flags().hermitian, local.flags().diagonal});
}

}  // namespace fockbench
