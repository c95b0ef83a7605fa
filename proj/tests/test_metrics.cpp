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

#include <numbers>
#include <random>

#include "fockbench/metrics.hpp"

namespace fb = fockbench;
using fb::Complex;

namespace {

constexpr double kTsirelson = 2.0 * std::numbers::sqrt2;

// Embeds a logical density matrix over nq dual-rail qubits into the Fock
// space with truncation `dim`.
fb::MixedState embed_logical(const fb::CMatrix &logical, std::size_t nq, int dim = 3) {
    auto reg = fb::ModeRegister::uniform(2 * nq, dim);
    const Eigen::Index d = Eigen::Index{1} << nq;
    std::vector<Eigen::Index> index(static_cast<std::size_t>(d));
    for (Eigen::Index l = 0; l < d; ++l) {
        std::vector<int> occ(2 * nq, 0);
        for (std::size_t q = 0; q < nq; ++q) occ[2 * q + ((l >> (nq - 1 - q)) & 1)] = 1;
        index[static_cast<std::size_t>(l)] = static_cast<Eigen::Index>(reg.index(occ));
    }
    const auto n = static_cast<Eigen::Index>(reg.joint_dim());
    fb::CMatrix rho = fb::CMatrix::Zero(n, n);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) rho(index[static_cast<std::size_t>(i)], index[static_cast<std::size_t>(j)]) = logical(i, j);
    return fb::MixedState::from_density(reg, rho);
}

fb::CMatrix projector(const fb::CVector &v) { return v * v.adjoint(); }

fb::CVector bell() {
    fb::CVector v = fb::CVector::Zero(4);
    v(0) = v(3) = 1.0 / std::numbers::sqrt2;
    return v;
}

fb::CVector ghz() {
    fb::CVector v = fb::CVector::Zero(8);
    v(0) = v(7) = 1.0 / std::numbers::sqrt2;
    return v;
}

fb::CMatrix random_density(Eigen::Index n, std::mt19937 &rng) {
    std::normal_distribution<double> g;
    fb::CMatrix a(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) a(i, j) = Complex(g(rng), g(rng));
    fb::CMatrix rho = a * a.adjoint();
    return rho / rho.trace().real();
}

fb::CVector random_qubit(std::mt19937 &rng) {
    std::normal_distribution<double> g;
    fb::CVector v(2);
    v << Complex(g(rng), g(rng)), Complex(g(rng), g(rng));
    return v.normalized();
}

fb::DetectorModel spd(double eta, double dark = 0.0) { return {fb::DetectorKind::spd, eta, dark, 1.0}; }

}  // namespace

TEST(G2Zero, NumberStates) {
    fb::FockSpace s(4);
    EXPECT_NEAR(fb::g2_zero(fb::number_state(s, 1)), 0.0, 1e-15);
    EXPECT_NEAR(fb::g2_zero(fb::number_state(s, 2)), 0.5, 1e-15);
    EXPECT_THROW(fb::g2_zero(fb::number_state(s, 0)), fb::UndefinedMetric);
}

TEST(G2Zero, ParametricSource) {
    const double p1 = 0.22751, p2 = 0.0225;
    const double expect = 2 * p2 / ((p1 + 2 * p2) * (p1 + 2 * p2));
    EXPECT_NEAR(fb::g2_zero(fb::parametric_source({0.5, 0.3}, fb::FockSpace(3))), expect, 1e-4);
}

TEST(G2Zero, InvariantUnderRelabeling) {
    fb::FockSpace s(3);
    auto rho = fb::tensor({fb::MixedState::from_pure(fb::number_state(s, 0)), fb::dephased_source({0.9, 0.25}, s)});
    std::vector<std::size_t> swap{1, 0};
    auto swapped = fb::permute_modes(rho, swap);
    EXPECT_NEAR(fb::g2_zero(rho, 1), fb::g2_zero(swapped, 0), 1e-14);
}

TEST(HeraldProbability, Examples) {
    fb::FockSpace s(3);
    EXPECT_EQ(fb::herald_probability(fb::number_state(s, 0)), 0.0);
    EXPECT_NEAR(fb::herald_probability(fb::number_state(s, 1)), 1.0, 1e-15);
    EXPECT_NEAR(fb::herald_probability(fb::parametric_source({0.5, 0.2}, s)), 0.25, 1e-14);
    EXPECT_NEAR(fb::herald_probability(fb::dephased_source({0.5, 0.2}, s)), 0.25, 1e-14);
}

TEST(AnalyzerPovm, IdealZAnalyzer) {
    auto spd1 = fb::DetectorModel::ideal_spd();
    auto p = fb::analyzer_povm(fb::kAnalyzerZ, spd1, spd1, 3);
    // Local index h * dim + v.
    EXPECT_NEAR(p.value()(3, 3).real(), 1.0, 1e-12);
    EXPECT_NEAR(p.value()(1, 1).real(), -1.0, 1e-12);
    EXPECT_NEAR(p.conclusive()(0, 0).real(), 0.0, 1e-12);
    EXPECT_NEAR(p.plus_click(3, 3).real(), 1.0, 1e-12);
}

TEST(QubitBlockView, MatchesDenseTrace) {
    std::mt19937 rng(3);
    auto rho = fb::MixedState::from_density(fb::ModeRegister::uniform(4, 3), random_density(81, rng));
    fb::QubitBlockView view(rho);
    auto spd1 = spd(0.8, 0.01);
    auto a = fb::analyzer_povm({0.3, 1.1}, spd1, spd1, 3);
    auto b = fb::analyzer_povm({2.0, -0.4}, spd1, spd1, 3);
    fb::CMatrix va = a.value(), pb = b.plus_click;
    const double dense = (fb::kron(va, pb) * rho.density()).trace().real();
    EXPECT_NEAR(view.expectation({&va, &pb}), dense, 1e-12);
}

TEST(BellWitness, Examples) {
    EXPECT_NEAR(fb::bell_witness(embed_logical(projector(bell()), 2)).value, -0.5, 1e-12);
    EXPECT_NEAR(fb::bell_witness(embed_logical(fb::CMatrix::Identity(4, 4) / 4.0, 2)).value, 0.25, 1e-12);
    fb::CVector hh = fb::CVector::Zero(4);
    hh(0) = 1.0;
    auto product = fb::bell_witness(embed_logical(projector(hh), 2));
    EXPECT_NEAR(product.value, 0.0, 1e-12);
    EXPECT_FALSE(product.violated);
}

TEST(BellWitness, SelectsBestTarget) {
    fb::CVector psi_minus = fb::CVector::Zero(4);
    psi_minus(1) = 1.0 / std::numbers::sqrt2;
    psi_minus(2) = -1.0 / std::numbers::sqrt2;
    auto r = fb::bell_witness(embed_logical(projector(psi_minus), 2));
    EXPECT_NEAR(r.value, -0.5, 1e-12);
    EXPECT_EQ(r.target, "psi-");
}

TEST(BellWitness, VacuumCountsAgainstWitness) {
    auto reg = fb::ModeRegister::uniform(4, 3);
    fb::CMatrix rho = embed_logical(projector(bell()), 2).density() * 0.5;
    rho(0, 0) += 0.5;
    auto mixed = fb::MixedState::from_density(reg, rho);
    EXPECT_NEAR(fb::bell_witness(mixed).value, 0.0, 1e-12);
    EXPECT_NEAR(fb::bell_witness(mixed, true).value, -0.5, 1e-12);
}

TEST(GhzWitness, Examples) {
    EXPECT_NEAR(fb::ghz_witness(embed_logical(projector(ghz()), 3)).value, -0.5, 1e-12);
    EXPECT_NEAR(fb::ghz_witness(embed_logical(fb::CMatrix::Identity(8, 8) / 8.0, 3)).value, 0.375, 1e-12);
}

TEST(GhzWitness, DepolarizedVisibility) {
    for (double v : {0.0, 0.2, 3.0 / 7.0, 0.6, 1.0}) {
        fb::CMatrix rho = v * projector(ghz()) + (1 - v) * fb::CMatrix::Identity(8, 8) / 8.0;
        auto r = fb::ghz_witness(embed_logical(rho, 3));
        EXPECT_NEAR(r.value, 0.5 - (7 * v + 1) / 8, 1e-12);
        EXPECT_EQ(r.violated, v > 3.0 / 7.0 + 1e-12);
    }
}

TEST(Chsh, TsirelsonAtCanonicalSettings) {
    auto r = fb::chsh(embed_logical(projector(bell()), 2), fb::SettingsMode::canonical);
    EXPECT_NEAR(r.value, kTsirelson, 1e-9);
    EXPECT_TRUE(r.violated);
    ASSERT_TRUE(r.settings);
    EXPECT_EQ(r.settings->analyzers.size(), 4u);
}

TEST(Chsh, WernerStateAtSeventyPercent) {
    fb::CMatrix rho = 0.7 * projector(bell()) + 0.3 * fb::CMatrix::Identity(4, 4) / 4.0;
    auto state = embed_logical(rho, 2);
    EXPECT_NEAR(fb::chsh(state, fb::SettingsMode::canonical).value, 1.9799, 1e-4);
    auto opt = fb::chsh(state, fb::SettingsMode::optimized);
    EXPECT_NEAR(opt.value, kTsirelson * 0.7, 1e-6);
    EXPECT_FALSE(opt.violated);
}

TEST(Chsh, ProductStatesRespectClassicalBound) {
    std::mt19937 rng(5);
    for (int trial = 0; trial < 3; ++trial) {
        fb::CVector psi = fb::kron(random_qubit(rng), random_qubit(rng));
        auto r = fb::chsh(embed_logical(projector(psi), 2), fb::SettingsMode::optimized, fb::DetectorModel::ideal_spd(), false, 1 + trial);
        EXPECT_LE(r.value, 2.0 + 1e-9);
    }
}

TEST(Ch, IdealBellPair) {
    auto state = embed_logical(projector(bell()), 2);
    const double expect = (std::numbers::sqrt2 - 1) / 2;
    EXPECT_NEAR(fb::ch_value(state, fb::SettingsMode::canonical).value, expect, 1e-9);
    EXPECT_NEAR(fb::ch_value(state, fb::SettingsMode::optimized).value, expect, 1e-6);
}

TEST(Ch, VacuumNeverViolates) {
    auto reg = fb::ModeRegister::uniform(4, 3);
    auto vac = fb::MixedState::from_pure(fb::vacuum(reg));
    for (double dark : {0.0, 1e-3}) {
        auto r = fb::ch_value(vac, fb::SettingsMode::optimized, spd(1.0, dark));
        EXPECT_LE(r.value, 1e-12);
        EXPECT_FALSE(r.violated);
    }
}

TEST(Ch, DetectionEfficiencyThreshold) {
    auto state = embed_logical(projector(bell()), 2);
    const double ratio = 1.0 + (std::numbers::sqrt2 - 1) / 2;
    for (double eta : {1.0, 0.9, 0.85, 0.8}) {
        auto r = fb::ch_value(state, fb::SettingsMode::canonical, spd(eta));
        EXPECT_NEAR(r.value, eta * eta * ratio - eta, 1e-9);
    }
    EXPECT_TRUE(fb::ch_value(state, fb::SettingsMode::canonical, spd(0.85)).violated);
    EXPECT_FALSE(fb::ch_value(state, fb::SettingsMode::optimized, spd(0.8)).violated);
}

TEST(Mermin, IdealGhz) {
    auto state = embed_logical(projector(ghz()), 3);
    EXPECT_NEAR(fb::mermin(state, fb::SettingsMode::canonical).value, 4.0, 1e-9);
}

TEST(Mermin, ProductStatesRespectLocalBound) {
    std::mt19937 rng(9);
    fb::CVector psi = fb::kron(fb::kron(random_qubit(rng), random_qubit(rng)), random_qubit(rng));
    auto r = fb::mermin(embed_logical(projector(psi), 3), fb::SettingsMode::optimized);
    EXPECT_LE(r.value, 2.0 + 1e-9);
}

TEST(Mermin, LostRailRemovesViolation) {
    auto state = fb::loss_channel(embed_logical(projector(ghz()), 3), 0.0, 5);
    auto r = fb::mermin(state, fb::SettingsMode::optimized);
    EXPECT_FALSE(r.violated);
}

TEST(Settings, OptimizationIsSound) {
    std::mt19937 rng(21);
    std::uniform_real_distribution<double> angle(0.0, 2 * std::numbers::pi);
    fb::CMatrix rho = 0.8 * projector(bell()) + 0.2 * random_density(4, rng);
    auto state = embed_logical(rho, 2);
    const double opt = fb::chsh(state, fb::SettingsMode::optimized).value;
    EXPECT_GE(opt + 1e-9, fb::chsh(state, fb::SettingsMode::canonical).value);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<fb::AnalyzerSetting> fixed(4);
        for (auto &s : fixed) s = {angle(rng), angle(rng)};
        EXPECT_GE(opt + 1e-9, fb::chsh(state, fb::SettingsMode::optimized, fb::DetectorModel::ideal_spd(), false, 1, fixed).value);
    }
}

TEST(Settings, OptimizationIsDeterministicPerSeed) {
    std::mt19937 rng(4);
    auto state = embed_logical(0.6 * projector(bell()) + 0.4 * random_density(4, rng), 2);
    auto a = fb::ch_value(state, fb::SettingsMode::optimized, spd(0.95), 7);
    auto b = fb::ch_value(state, fb::SettingsMode::optimized, spd(0.95), 7);
    EXPECT_EQ(a.value, b.value);
}

TEST(MetricResult, Margin) {
    auto above = fb::make_result("chsh", 2.5, 2.0, true);
    EXPECT_TRUE(above.violated);
    EXPECT_NEAR(above.margin(), 0.5, 1e-15);
    auto below = fb::make_result("witness", 0.1, 0.0, false);
    EXPECT_FALSE(below.violated);
    EXPECT_NEAR(below.margin(), -0.1, 1e-15);
    auto nan = fb::make_result("ch", std::nan(""), 0.0, true);
    EXPECT_FALSE(nan.violated);
    EXPECT_EQ(nan.margin(), -std::numeric_limits<double>::infinity());
}

TEST(EvaluateMetric, EmptyOutputAndApplicability) {
    fb::CircuitOutput empty;
    empty.circuit = fb::CircuitId::klm1;
    auto devices = fb::default_devices(fb::CircuitId::klm1);
    auto r = fb::evaluate_metric(fb::MetricId::ch, empty, devices, fb::SettingsMode::canonical, 1);
    EXPECT_TRUE(std::isnan(r.value));
    EXPECT_FALSE(r.violated);
    EXPECT_THROW(fb::evaluate_metric(fb::MetricId::mermin, empty, devices, fb::SettingsMode::canonical, 1), fb::ValidationError);
    EXPECT_THROW(fb::metric_from_string("bogus"), fb::ValidationError);
}

TEST(ThresholdScan, FindsLinearCrossing) {
    // Violated while g2 < 0.1.
    auto metric = [](const fb::SourceSpec &s) { return fb::make_result("toy", 0.1 - s.g2(), 0.0, true); };
    auto r = fb::threshold_scan(0.8, metric);
    ASSERT_EQ(r.status, fb::ThresholdStatus::found);
    EXPECT_NEAR(r.g2, 0.1, 2e-3);
    EXPECT_GT(r.lower.margin, 0.0);
    EXPECT_LE(r.upper.margin, 0.0);
    EXPECT_LE(r.upper.omega - r.lower.omega, 1e-3);
    EXPECT_LE(r.iterations, 40);
    EXPECT_TRUE(r.monotone);
    EXPECT_EQ(fb::to_string(r.status), "threshold");
}

TEST(ThresholdScan, NoViolationAndAboveRange) {
    auto never = [](const fb::SourceSpec &) { return fb::make_result("toy", -1.0, 0.0, true); };
    EXPECT_EQ(fb::threshold_scan(0.8, never).status, fb::ThresholdStatus::no_violation);
    auto always = [](const fb::SourceSpec &) { return fb::make_result("toy", 1.0, 0.0, true); };
    EXPECT_EQ(fb::threshold_scan(0.8, always).status, fb::ThresholdStatus::above_range);
    EXPECT_THROW(fb::threshold_scan(0.0, always), fb::ValidationError);
}

TEST(ThresholdScan, FlagsNonMonotoneMetric) {
    auto bumpy = [](const fb::SourceSpec &s) {
        const double g = s.g2();
        return fb::make_result("toy", 0.1 - g + 0.2 * std::sin(60 * g), 0.0, true);
    };
    auto r = fb::threshold_scan(0.8, bumpy);
    if (r.status == fb::ThresholdStatus::found) EXPECT_FALSE(r.monotone);
}
