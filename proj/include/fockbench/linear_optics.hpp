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

// Passive linear optics. A TransferMatrix T maps a photon entering mode j to
// mode k with amplitude T(k, j). Two routes lift it to Fock space:
//
//  * lift_transfer: exp(-i H) with H = sum_jk h_jk a_j^dag a_k, h = i log T,
//    on a truncated register. Exact on every photon-number block that fits
//    the truncation.
//  * propagate: expands prod_j (sum_k T_kj a_k^dag)^n_j / sqrt(n_j!) for one
//    input configuration without any truncation. Circuits use this route.

#pragma once

#include <array>
#include <cstdint>
#include <unordered_map>

#include <Eigen/Eigenvalues>

#include "fockbench/fock_core.hpp"

namespace fockbench {

class TransferMatrix {
   public:
    explicit TransferMatrix(CMatrix matrix) : m_(std::move(matrix)) {
        if (m_.rows() != m_.cols() || m_.rows() == 0) throw ValidationError("transfer matrix must be square and non-empty");
        if (unitarity_defect(m_) > kAlgebraicTol) throw ValidationError("transfer matrix is not unitary");
    }

    static TransferMatrix identity(std::size_t modes) {
        const auto n = static_cast<Eigen::Index>(modes);
        return TransferMatrix(CMatrix::Identity(n, n));
    }

    /// Embeds a 2x2 unitary acting on modes (first, second) of an M-mode system.
    static TransferMatrix two_mode(std::size_t modes, std::size_t first, std::size_t second, const Eigen::Matrix2cd &u) {
        if (first >= modes || second >= modes || first == second) throw ValidationError("two_mode: invalid mode pair");
        CMatrix m = CMatrix::Identity(static_cast<Eigen::Index>(modes), static_cast<Eigen::Index>(modes));
        const auto a = static_cast<Eigen::Index>(first), b = static_cast<Eigen::Index>(second);
        m(a, a) = u(0, 0);
        m(a, b) = u(0, 1);
        m(b, a) = u(1, 0);
        m(b, b) = u(1, 1);
        return TransferMatrix(std::move(m));
    }

    std::size_t mode_count() const { return static_cast<std::size_t>(m_.rows()); }
    const CMatrix &matrix() const { return m_; }
    Complex operator()(Eigen::Index k, Eigen::Index j) const { return m_(k, j); }

    /// `later` applied after `*this`.
    TransferMatrix then(const TransferMatrix &later) const {
        if (later.mode_count() != mode_count()) throw ValidationError("transfer composition: mode counts differ");
        return TransferMatrix(later.m_ * m_);
    }

   private:
    CMatrix m_;
};

/// 50:50 beamsplitter exp(-i theta sigma_x) at theta = pi/4, the convention
/// of H = theta (a1^dag a2 + a1 a2^dag).
inline Eigen::Matrix2cd beamsplitter_unitary(double theta) {
    Eigen::Matrix2cd u;
    u << std::cos(theta), Complex(0.0, -std::sin(theta)), Complex(0.0, -std::sin(theta)), std::cos(theta);
    return u;
}

/// Polarization analyzer: output port 0 projects onto
/// cos(theta/2)|H> + e^{i phi} sin(theta/2)|V>, port 1 onto the orthogonal state.
inline Eigen::Matrix2cd analyzer_unitary(double theta, double phi) {
    const double c = std::cos(theta / 2), s = std::sin(theta / 2);
    const Complex e = std::exp(Complex(0.0, -phi));
    Eigen::Matrix2cd u;
    u << c, e * s, -s, e * c;
    return u;
}

/// Qubit rotation U acting on dual-rail amplitudes (h, v): columns are the
/// images of |H> and |V>.
inline Eigen::Matrix2cd hadamard_unitary() {
    Eigen::Matrix2cd u;
    const double r = 1.0 / std::sqrt(2.0);
    u << r, r, r, -r;
    return u;
}

// ---------------------------------------------------------------------------
// Packed occupations: 4 bits per mode, up to 16 modes and 15 photons per mode.

using PackedOccupation = std::uint64_t;
using SparseFockVector = std::unordered_map<PackedOccupation, Complex>;

inline constexpr std::size_t kMaxPackedModes = 16;
inline constexpr int kMaxPackedPhotons = 15;

inline int packed_count(PackedOccupation occ, std::size_t mode) { return static_cast<int>((occ >> (4 * mode)) & 0xF); }

inline PackedOccupation pack_occupation(std::span<const int> occ) {
    if (occ.size() > kMaxPackedModes) throw ValidationError("too many modes for packed occupation");
    PackedOccupation p = 0;
    for (std::size_t k = 0; k < occ.size(); ++k) {
        if (occ[k] < 0 || occ[k] > kMaxPackedPhotons) throw ValidationError("photon count outside packed range");
        p |= static_cast<PackedOccupation>(occ[k]) << (4 * k);
    }
    return p;
}

inline std::vector<int> unpack_occupation(PackedOccupation occ, std::size_t modes) {
    std::vector<int> out(modes);
    for (std::size_t k = 0; k < modes; ++k) out[k] = packed_count(occ, k);
    return out;
}

/// Exact output of the passive network for one Fock input configuration.
inline SparseFockVector propagate(const TransferMatrix &transfer, std::span<const int> input) {
    const std::size_t m = transfer.mode_count();
    if (input.size() != m) throw RegisterMismatch("propagate: occupation length differs from mode count");
    if (m > kMaxPackedModes) throw ValidationError("propagate: too many modes");
    int total = 0;
    double norm = 1.0;
    for (int n : input) {
        total += n;
        for (int k = 2; k <= n; ++k) norm *= k;
    }
    if (total > kMaxPackedPhotons) throw ValidationError("propagate: too many photons");
    SparseFockVector state{{PackedOccupation{0}, Complex(1.0)}};
    for (std::size_t j = 0; j < m; ++j) {
        for (int rep = 0; rep < input[j]; ++rep) {
            SparseFockVector next;
            next.reserve(state.size() * m);
            for (const auto &[occ, amp] : state) {
                for (std::size_t k = 0; k < m; ++k) {
                    const Complex t = transfer(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j));
                    if (t == Complex(0.0)) continue;
                    const int nk = packed_count(occ, k);
                    next[occ + (PackedOccupation{1} << (4 * k))] += amp * t * std::sqrt(static_cast<double>(nk + 1));
                }
            }
            state = std::move(next);
        }
    }
    const double scale = 1.0 / std::sqrt(norm);
    for (auto &kv : state) kv.second *= scale;
    return state;
}

/// Caches `propagate` results for one transfer matrix.
class Propagator {
   public:
    explicit Propagator(TransferMatrix transfer) : transfer_(std::move(transfer)) {}

    const TransferMatrix &transfer() const { return transfer_; }

    const SparseFockVector &operator()(std::span<const int> input) {
        PackedOccupation key = pack_occupation(input);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
        return cache_.emplace(key, propagate(transfer_, input)).first->second;
    }

   private:
    TransferMatrix transfer_;
    std::unordered_map<PackedOccupation, SparseFockVector> cache_;
};

// ---------------------------------------------------------------------------
// Hamiltonian lift.

/// Hermitian h with T = exp(-i h), principal branch of the matrix logarithm.
inline CMatrix transfer_generator(const TransferMatrix &transfer) {
    Eigen::ComplexSchur<CMatrix> schur(transfer.matrix());
    const CMatrix &q = schur.matrixU();
    const CMatrix &r = schur.matrixT();
    CVector logs(r.rows());
    for (Eigen::Index k = 0; k < r.rows(); ++k) logs(k) = std::log(r(k, k));
    CMatrix h = Complex(0.0, 1.0) * (q * logs.asDiagonal() * q.adjoint());
    return 0.5 * (h + h.adjoint());
}

/// Second-quantized H = sum_jk h_jk a_j^dag a_k on a truncated register.
inline FockOperator quadratic_hamiltonian(const CMatrix &h, const ModeRegister &reg) {
    if (static_cast<std::size_t>(h.rows()) != reg.size()) throw RegisterMismatch("quadratic_hamiltonian: size mismatch");
    const std::size_t n = reg.joint_dim();
    const std::size_t m = reg.size();
    CMatrix out = CMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t col = 0; col < n; ++col) {
        std::vector<int> occ = reg.occupation(col);
        for (std::size_t k = 0; k < m; ++k) {
            if (occ[k] == 0) continue;
            for (std::size_t j = 0; j < m; ++j) {
                const Complex hjk = h(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k));
                if (hjk == Complex(0.0)) continue;
                double amp = std::sqrt(static_cast<double>(occ[k]));
                std::vector<int> o = occ;
                o[k] -= 1;
                if (o[j] + 1 >= reg.dim(j)) continue;
                amp *= std::sqrt(static_cast<double>(o[j] + 1));
                o[j] += 1;
                out(static_cast<Eigen::Index>(reg.index(o)), static_cast<Eigen::Index>(col)) += hjk * amp;
            }
        }
    }
    return FockOperator(reg, std::move(out), {false, true, false});
}

/// Fock-space lift of a passive transfer on `transfer.mode_count()` modes of
/// dimension `space.dim()`. Dense; meant for registers up to a few thousand
/// basis states.
inline FockOperator lift_transfer(const TransferMatrix &transfer, const FockSpace &space) {
    ModeRegister reg = ModeRegister::uniform(transfer.mode_count(), space.dim());
    return evolve_hamiltonian(quadratic_hamiltonian(transfer_generator(transfer), reg));
}

/// Total photon number operator of a register.
inline FockOperator total_number_operator(const ModeRegister &reg) {
    Eigen::VectorXd d(static_cast<Eigen::Index>(reg.joint_dim()));
    for (std::size_t i = 0; i < reg.joint_dim(); ++i) d(static_cast<Eigen::Index>(i)) = reg.total_photons(i);
    return FockOperator::from_diagonal(reg, d);
}

}  // namespace fockbench
