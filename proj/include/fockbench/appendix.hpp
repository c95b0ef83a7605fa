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

// Reference listings for a beamsplitter, a bucket detector and an SPDC
// source, compared entry by entry against freshly built operators.

#pragma once

#include <numbers>
#include <string>
#include <vector>

#include "fockbench/devices.hpp"

namespace fockbench {

/// theta (a1^dag a2 + a1 a2^dag) on two modes.
inline FockOperator beamsplitter_hamiltonian(const FockSpace &space, double theta) {
    ModeRegister reg = ModeRegister::uniform(2, space.dim());
    FockOperator a1 = embed(annihilation(space), reg, 0);
    FockOperator a2 = embed(annihilation(space), reg, 1);
    CMatrix h = theta * (a1.adjoint() * a2 + a1 * a2.adjoint()).matrix();
    return FockOperator(reg, std::move(h), {false, true, false});
}

struct FixtureEntry {
    std::string fixture;
    /// 1-based (row, column) as printed in the listing.
    std::string entry;
    Complex expected;
    Complex actual;
    bool pass = false;
};

struct FixtureOptions {
    double tolerance = kFixtureTol;
    double spdc_squeeze = 0.4;
    /// Overrides every fixture's truncation when positive.
    int fock_dim = 0;
};

namespace detail {

inline void add_entry(std::vector<FixtureEntry> &out, const std::string &fixture, const CMatrix &m, Eigen::Index row, Eigen::Index col,
                      Complex expected, double tol) {
    FixtureEntry e{fixture, "(" + std::to_string(row) + "," + std::to_string(col) + ")", expected, Complex(std::nan(""), std::nan("")), false};
    if (row - 1 < m.rows() && col - 1 < m.cols()) {
        e.actual = m(row - 1, col - 1);
        e.pass = std::abs(e.actual - expected) <= tol;
    }
    out.push_back(e);
}

}  // namespace detail

/// Every listed entry with its computed counterpart.
inline std::vector<FixtureEntry> appendix_fixtures(const FixtureOptions &opt = {}) {
    std::vector<FixtureEntry> out;
    const Complex i(0.0, 1.0);
    const double tol = opt.tolerance;
    auto dim = [&](int listed) { return opt.fock_dim > 0 ? opt.fock_dim : listed; };

    const CMatrix bs = evolve_hamiltonian(beamsplitter_hamiltonian(FockSpace(dim(5)), std::numbers::pi / 4)).matrix();
    const std::string b = "beamsplitter";
    detail::add_entry(out, b, bs, 2, 2, 0.70711, tol);
    detail::add_entry(out, b, bs, 6, 2, -0.70711 * i, tol);
    detail::add_entry(out, b, bs, 3, 3, 0.5, tol);
    detail::add_entry(out, b, bs, 11, 3, -0.5, tol);
    detail::add_entry(out, b, bs, 4, 4, 0.35355, tol);
    detail::add_entry(out, b, bs, 8, 4, -0.61237 * i, tol);
    detail::add_entry(out, b, bs, 16, 4, 0.35355 * i, tol);

    const FockSpace ds(dim(4));
    const DetectorOperators det = bucket_detector(ds, {DetectorKind::bucket, 0.6, 0.001, 1.0});
    const double click[] = {0.001, 0.601, 0.841, 0.937};
    const double none[] = {0.999, 0.399, 0.159, 0.063};
    for (Eigen::Index k = 0; k < 4; ++k) {
        detail::add_entry(out, "bucket_click", det.click.matrix(), k + 1, k + 1, click[k], tol);
        detail::add_entry(out, "bucket_no_click", det.no_click.matrix(), k + 1, k + 1, none[k], tol);
    }

    const FockSpace ss(dim(4));
    const PureState pair = spdc_state(SqueezerSpec{opt.spdc_squeeze}, ss);
    const CMatrix amps = pair.amplitudes();
    const Complex spdc[] = {0.925, -0.35162 * i, -0.13218, 0.057186 * i};
    for (int n = 0; n < 4; ++n) {
        // |n, n> sits at joint index n * (dim + 1).
        detail::add_entry(out, "spdc", amps, n * (ss.dim() + 1) + 1, 1, spdc[n], tol);
    }
    return out;
}

}  // namespace fockbench
