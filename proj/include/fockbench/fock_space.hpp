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

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace fockbench {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

/// Tolerance for algebraic identities (unitarity, trace, hermiticity).
inline constexpr double kAlgebraicTol = 1e-10;
/// Tolerance for comparing against five-digit printed reference values.
inline constexpr double kFixtureTol = 1e-4;

/// Raised when an input violates a documented precondition.
class ValidationError : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when two objects live on incompatible mode registers.
class RegisterMismatch : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

/// A single bosonic mode truncated to photon numbers 0 .. dim-1.
///
/// Basis element k (0-based) holds exactly k photons. Printed reference
/// listings use 1-based indices, so listing index i is photon number i-1.
class FockSpace {
   public:
    explicit FockSpace(int dim) : dim_(dim) {
        if (dim < 2) {
            throw ValidationError("FockSpace dimension must be >= 2, got " + std::to_string(dim));
        }
    }

    int dim() const { return dim_; }
    int max_photons() const { return dim_ - 1; }

    bool operator==(const FockSpace &other) const = default;

   private:
    int dim_;
};

/// Ordered list of modes. Mode 0 is the most significant digit of the joint
/// index, so tensor(|1>, |0>) at dim 5 sits at joint index 5.
class ModeRegister {
   public:
    ModeRegister() = default;

    explicit ModeRegister(std::vector<FockSpace> modes) : modes_(std::move(modes)) { rebuild_strides(); }

    static ModeRegister uniform(std::size_t mode_count, int dim) {
        return ModeRegister(std::vector<FockSpace>(mode_count, FockSpace(dim)));
    }

    std::size_t size() const { return modes_.size(); }
    bool empty() const { return modes_.empty(); }
    const std::vector<FockSpace> &modes() const { return modes_; }
    int dim(std::size_t mode) const { return modes_.at(mode).dim(); }
    std::size_t joint_dim() const { return joint_dim_; }
    std::size_t stride(std::size_t mode) const { return strides_.at(mode); }

    std::size_t index(std::span<const int> occupation) const {
        if (occupation.size() != modes_.size()) {
            throw RegisterMismatch("occupation length does not match register size");
        }
        std::size_t idx = 0;
        for (std::size_t k = 0; k < modes_.size(); ++k) {
            if (occupation[k] < 0 || occupation[k] >= modes_[k].dim()) {
                throw std::out_of_range("photon number " + std::to_string(occupation[k]) + " outside mode " +
                                        std::to_string(k) + " truncation");
            }
            idx += static_cast<std::size_t>(occupation[k]) * strides_[k];
        }
        return idx;
    }

    std::vector<int> occupation(std::size_t index) const {
        std::vector<int> occ(modes_.size());
        for (std::size_t k = 0; k < modes_.size(); ++k) {
            occ[k] = static_cast<int>((index / strides_[k]) % static_cast<std::size_t>(modes_[k].dim()));
        }
        return occ;
    }

    int photons_in(std::size_t index, std::size_t mode) const {
        return static_cast<int>((index / strides_[mode]) % static_cast<std::size_t>(modes_[mode].dim()));
    }

    int total_photons(std::size_t index) const {
        int total = 0;
        for (std::size_t k = 0; k < modes_.size(); ++k) total += photons_in(index, k);
        return total;
    }

    ModeRegister concat(const ModeRegister &other) const {
        std::vector<FockSpace> all = modes_;
        all.insert(all.end(), other.modes_.begin(), other.modes_.end());
        return ModeRegister(std::move(all));
    }

    ModeRegister subset(std::span<const std::size_t> keep) const {
        std::vector<FockSpace> sub;
        sub.reserve(keep.size());
        for (std::size_t k : keep) sub.push_back(modes_.at(k));
        return ModeRegister(std::move(sub));
    }

    bool operator==(const ModeRegister &other) const { return modes_ == other.modes_; }

   private:
    void rebuild_strides() {
        strides_.assign(modes_.size(), 1);
        joint_dim_ = 1;
        for (std::size_t k = modes_.size(); k-- > 0;) {
            strides_[k] = joint_dim_;
            joint_dim_ *= static_cast<std::size_t>(modes_[k].dim());
        }
    }

    std::vector<FockSpace> modes_;
    std::vector<std::size_t> strides_;
    std::size_t joint_dim_ = 1;
};

inline void require_same_register(const ModeRegister &a, const ModeRegister &b, const char *what) {
    if (!(a == b)) throw RegisterMismatch(std::string(what) + ": mode registers differ");
}

}  // namespace fockbench
