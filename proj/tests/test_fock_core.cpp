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

#include <gtest/gtest.h>

#include <random>

#include "fockbench/fock_core.hpp"

namespace fb = fockbench;
using fb::Complex;

namespace {

fb::FockOperator beamsplitter_hamiltonian(int dim, double theta) {
    fb::FockSpace s(dim);
    auto reg = fb::ModeRegister::uniform(2, dim);
    auto a1 = fb::embed(fb::annihilation(s), reg, 0);
    auto a2 = fb::embed(fb::annihilation(s), reg, 1);
    fb::CMatrix h = theta * (a1.adjoint() * a2 + a1 * a2.adjoint()).matrix();
    return fb::FockOperator(reg, h, {false, true, false});
}

fb::CMatrix random_density(std::size_t n, std::mt19937 &rng) {
    std::normal_distribution<double> g;
    fb::CMatrix a(n, n);
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = Complex(g(rng), g(rng));
    fb::CMatrix rho = a * a.adjoint();
    return rho / rho.trace().real();
}

}  // namespace

TEST(FockSpace, RejectsDimensionBelowTwo) {
    EXPECT_THROW(fb::FockSpace(1), fb::ValidationError);
    EXPECT_NO_THROW(fb::FockSpace(2));
}

TEST(Annihilation, SuperdiagonalAtDimFour) {
    auto a = fb::annihilation(fb::FockSpace(4));
    EXPECT_NEAR(a(0, 1).real(), 1.0, 1e-12);
    EXPECT_NEAR(a(1, 2).real(), 1.4142, 1e-4);
    EXPECT_NEAR(a(2, 3).real(), 1.7321, 1e-4);
    fb::CMatrix off = a.matrix();
    off(0, 1) = off(1, 2) = off(2, 3) = 0.0;
    EXPECT_EQ(off.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Annihilation, TwoLevelTruncation) {
    auto a = fb::annihilation(fb::FockSpace(2));
    EXPECT_EQ(a(0, 1), Complex(1.0));
    EXPECT_EQ(a(1, 0), Complex(0.0));
}

TEST(Annihilation, AdjointIsCreation) {
    auto ad = fb::creation(fb::FockSpace(4));
    EXPECT_NEAR(ad(1, 0).real(), 1.0, 1e-12);
    EXPECT_NEAR(ad(2, 1).real(), 1.4142, 1e-4);
    EXPECT_NEAR(ad(3, 2).real(), 1.7321, 1e-4);
}

TEST(NumberState, PlacesPhotonNumber) {
    auto vac = fb::number_state(fb::FockSpace(4), 0);
    EXPECT_EQ(vac.amplitudes(), (fb::CVector(4) << 1, 0, 0, 0).finished());
    auto one = fb::number_state(fb::FockSpace(5), 1);
    EXPECT_EQ(one.amplitudes(), (fb::CVector(5) << 0, 1, 0, 0, 0).finished());
    EXPECT_THROW(fb::number_state(fb::FockSpace(4), 4), std::out_of_range);
}

TEST(Tensor, ModeZeroIsMostSignificant) {
    fb::FockSpace s(5);
    auto psi = fb::tensor({fb::number_state(s, 1), fb::number_state(s, 0)});
    ASSERT_EQ(psi.amplitudes().size(), 25);
    EXPECT_EQ(psi.amplitudes()(5), Complex(1.0));  // 1-based index 6
    EXPECT_NEAR(psi.norm(), 1.0, 1e-15);
}

TEST(Tensor, IdentityAndVacuum) {
    fb::FockSpace s(3);
    auto i1 = fb::FockOperator::identity(fb::ModeRegister({s}));
    auto ii = fb::tensor({i1, i1});
    EXPECT_TRUE(ii.matrix().isIdentity());
    EXPECT_TRUE(ii.flags().unitary);
    auto vac = fb::tensor({fb::number_state(s, 0), fb::number_state(s, 0), fb::number_state(s, 0)});
    EXPECT_EQ(vac.amplitudes().size(), 27);
    EXPECT_EQ(vac.amplitudes()(0), Complex(1.0));
}

TEST(Tensor, MixedKindsRejected) {
    fb::FockSpace s(3);
    std::vector<fb::FockObject> parts{fb::number_state(s, 0), fb::FockOperator::identity(fb::ModeRegister({s}))};
    EXPECT_THROW(fb::tensor(std::span<const fb::FockObject>(parts)), fb::KindMismatch);
}

TEST(EvolveHamiltonian, BeamsplitterListing) {
    auto u = fb::evolve_hamiltonian(beamsplitter_hamiltonian(5, std::numbers::pi / 4));
    EXPECT_NEAR(u(1, 1).real(), 0.70711, 1e-4);
    EXPECT_NEAR(std::abs(u(1, 1).imag()), 0.0, 1e-10);
    EXPECT_NEAR(u(5, 1).imag(), -0.70711, 1e-4);
    EXPECT_NEAR(u(2, 2).real(), 0.5, 1e-4);
    EXPECT_NEAR(u(10, 2).real(), -0.5, 1e-4);
    EXPECT_NEAR(u(3, 3).real(), 0.35355, 1e-4);
    EXPECT_NEAR(u(7, 3).imag(), -0.61237, 1e-4);
    EXPECT_NEAR(u(15, 3).imag(), 0.35355, 1e-4);
    EXPECT_TRUE(u.flags().unitary);
}

TEST(EvolveHamiltonian, ZeroIsIdentity) {
    auto reg = fb::ModeRegister::uniform(2, 3);
    fb::FockOperator zero(reg, fb::CMatrix::Zero(9, 9), {false, true, true});
    EXPECT_TRUE(fb::evolve_hamiltonian(zero).matrix().isIdentity(1e-15));
}

TEST(EvolveHamiltonian, RejectsNonHermitian) {
    auto reg = fb::ModeRegister::uniform(1, 3);
    fb::CMatrix m = fb::CMatrix::Zero(3, 3);
    m(0, 1) = 1.0;
    EXPECT_THROW(fb::evolve_hamiltonian(fb::FockOperator(reg, m)), fb::ValidationError);
}

TEST(EvolveHamiltonian, UnitaryForAllSmallDims) {
    for (int n = 2; n <= 6; ++n) {
        auto u = fb::evolve_hamiltonian(beamsplitter_hamiltonian(n, 0.37));
        EXPECT_LT(fb::unitarity_defect(u.matrix()), 1e-10) << "dim " << n;
    }
}

TEST(Expectation, NumberOperatorAndIdentity) {
    fb::FockSpace s(4);
    auto two = fb::number_state(s, 2);
    EXPECT_NEAR(fb::real_expectation(fb::number_operator(s), two), 2.0, 1e-12);
    auto id = fb::FockOperator::identity(two.reg());
    EXPECT_NEAR(fb::real_expectation(id, two), 1.0, 1e-12);
}

TEST(Expectation, RegisterMismatch) {
    EXPECT_THROW(fb::expectation(fb::number_operator(fb::FockSpace(4)), fb::number_state(fb::FockSpace(3), 1)),
                 fb::RegisterMismatch);
}

TEST(PartialTrace, ProductState) {
    fb::FockSpace s(3);
    auto psi = fb::tensor({fb::number_state(s, 1), fb::number_state(s, 0)});
    auto rho = fb::partial_trace(psi, {0});
    fb::CMatrix expect = fb::CMatrix::Zero(3, 3);
    expect(1, 1) = 1.0;
    EXPECT_LT((rho.density() - expect).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_THROW(fb::partial_trace(psi, std::span<const std::size_t>{}), fb::ValidationError);
}

TEST(PartialTrace, BellPairArmIsMaximallyMixed) {
    auto reg = fb::ModeRegister::uniform(4, 2);
    fb::CVector v = fb::CVector::Zero(16);
    v(reg.index(std::vector<int>{1, 0, 1, 0})) = 1.0 / std::sqrt(2.0);
    v(reg.index(std::vector<int>{0, 1, 0, 1})) = 1.0 / std::sqrt(2.0);
    auto rho = fb::partial_trace(fb::PureState(reg, v), {0, 1});
    EXPECT_NEAR(rho.density()(1, 1).real(), 0.5, 1e-12);
    EXPECT_NEAR(rho.density()(2, 2).real(), 0.5, 1e-12);
    EXPECT_NEAR(std::abs(rho.density()(1, 2)), 0.0, 1e-12);
}

TEST(PartialTrace, TensorDuality) {
    std::mt19937 rng(7);
    auto ra = fb::MixedState::from_density(fb::ModeRegister::uniform(1, 3), random_density(3, rng));
    auto rb = fb::MixedState::from_density(fb::ModeRegister::uniform(2, 2), random_density(4, rng));
    auto joint = fb::tensor({ra, rb});
    EXPECT_LT((fb::partial_trace(joint, {0}).density() - ra.density()).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LT((fb::partial_trace(joint, {1, 2}).density() - rb.density()).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(MixedState, DiagonalFastPathMatchesDense) {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto reg = fb::ModeRegister::uniform(2, 3);
    std::vector<fb::DiagonalTerm> terms;
    double total = 0.0;
    for (std::size_t i = 0; i < 9; ++i) {
        double w = u(rng);
        terms.push_back({w, i});
        total += w;
    }
    for (auto &t : terms) t.weight /= total;
    auto diag = fb::MixedState::diagonal(reg, terms);
    auto dense = diag.to_dense();
    diag.validate();
    dense.validate();
    for (int trial = 0; trial < 5; ++trial) {
        Eigen::VectorXd d(9);
        for (int i = 0; i < 9; ++i) d(i) = u(rng);
        auto op = fb::FockOperator::from_diagonal(reg, d);
        EXPECT_NEAR(fb::real_expectation(op, diag), fb::real_expectation(op, dense), 1e-10);
    }
}

TEST(MeasureAndCondition, UnitClickOnPairArm) {
    fb::FockSpace s(3);
    auto psi = fb::tensor({fb::number_state(s, 1), fb::number_state(s, 1)});
    Eigen::VectorXd click(3);
    click << 0, 1, 1;
    auto out = fb::measure_and_condition(psi, fb::FockOperator::from_diagonal(fb::ModeRegister({s}), click), 0);
    EXPECT_NEAR(out.probability, 1.0, 1e-12);
    ASSERT_FALSE(out.empty());
    EXPECT_NEAR(out.conditional->density()(1, 1).real(), 1.0, 1e-12);
}

TEST(MeasureAndCondition, NoClickOnVacuumAndEmptyOutcome) {
    fb::FockSpace s(3);
    auto vac = fb::tensor({fb::number_state(s, 0), fb::number_state(s, 0)});
    Eigen::VectorXd no_click(3), click(3);
    no_click << 1, 0, 0;
    click << 0, 1, 1;
    auto reg1 = fb::ModeRegister({s});
    auto out = fb::measure_and_condition(vac, fb::FockOperator::from_diagonal(reg1, no_click), 1);
    EXPECT_NEAR(out.probability, 1.0, 1e-12);
    EXPECT_NEAR(out.conditional->density()(0, 0).real(), 1.0, 1e-12);
    auto none = fb::measure_and_condition(vac, fb::FockOperator::from_diagonal(reg1, click), 1);
    EXPECT_EQ(none.probability, 0.0);
    EXPECT_TRUE(none.empty());
}

TEST(MeasureAndCondition, RejectsEntriesOutsideUnitInterval) {
    fb::FockSpace s(3);
    auto vac = fb::tensor({fb::number_state(s, 0), fb::number_state(s, 0)});
    Eigen::VectorXd bad(3);
    bad << 1.2, 0, 0;
    EXPECT_THROW(fb::measure_and_condition(vac, fb::FockOperator::from_diagonal(fb::ModeRegister({s}), bad), 0),
                 fb::ValidationError);
}

TEST(ApplyLocal, MatchesFullEmbedding) {
    std::mt19937 rng(3);
    auto reg = fb::ModeRegister::uniform(3, 2);
    auto rho = fb::MixedState::from_density(reg, random_density(8, rng));
    fb::CMatrix x = fb::CMatrix::Zero(2, 2);
    x(0, 1) = x(1, 0) = 1.0;
    std::vector<std::size_t> modes{1};
    auto out = fb::apply_local(rho, x, modes);
    fb::CMatrix full = fb::embed(fb::FockOperator(fb::ModeRegister::uniform(1, 2), x), reg, 1).matrix();
    EXPECT_LT((out.density() - full * rho.density() * full.adjoint()).cwiseAbs().maxCoeff(), 1e-12);
}
