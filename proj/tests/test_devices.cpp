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

#include <cmath>

#include "fockbench/devices.hpp"
#include "fockbench/metrics.hpp"

namespace fb = fockbench;
using fb::Complex;

namespace {

Eigen::VectorXd diag(const fb::FockOperator &op) { return op.matrix().diagonal().real(); }

fb::DetectorModel bucket(double eta, double dark = 0.0) { return {fb::DetectorKind::bucket, eta, dark, 1.0}; }
fb::DetectorModel spd(double eta, double dark = 0.0) { return {fb::DetectorKind::spd, eta, dark, 1.0}; }

}  // namespace

TEST(ParametricSource, Limits) {
    fb::FockSpace s(3);
    auto vac = fb::parametric_source({0.0, 0.7}, s);
    EXPECT_NEAR(std::abs(vac.amplitudes()(0)), 1.0, 1e-15);
    auto one = fb::parametric_source({1.0, 0.0}, s);
    EXPECT_NEAR(std::abs(one.amplitudes()(1)), 1.0, 1e-15);
    EXPECT_NEAR(one.amplitudes()(0).real(), 0.0, 1e-15);
}

TEST(ParametricSource, Amplitudes) {
    auto psi = fb::parametric_source({0.5, 0.3}, fb::FockSpace(4));
    EXPECT_NEAR(psi.amplitudes()(0).real(), 0.8660, 1e-4);
    EXPECT_NEAR(psi.amplitudes()(1).real(), 0.4770, 1e-4);
    EXPECT_NEAR(psi.amplitudes()(2).real(), 0.1500, 1e-4);
    EXPECT_NEAR(psi.norm(), 1.0, 1e-12);
}

TEST(ParametricSource, NeedsThreeLevels) { EXPECT_THROW(fb::parametric_source({0.5, 0.1}, fb::FockSpace(2)), fb::ValidationError); }

TEST(SourceSpec, ClosedFormG2MatchesNumberBasis) {
    for (double e : {0.3, 0.7, 1.0}) {
        for (double w : {0.0, 0.1, 0.4}) {
            fb::SourceSpec s{e, w};
            auto psi = fb::parametric_source(s, fb::FockSpace(3));
            EXPECT_NEAR(fb::g2_zero(psi), s.g2(), 1e-12);
        }
    }
}

TEST(SourceSpec, FromTargetsRoundTrip) {
    for (double p : {0.2, 0.65, 0.9, 1.0}) {
        for (double g : {0.0, 0.01, 0.14, 0.39}) {
            fb::SourceSpec s = fb::source_from_targets(p, g);
            EXPECT_NEAR(s.herald_probability(), p, 1e-12);
            EXPECT_NEAR(s.g2(), g, 1e-12);
        }
    }
    EXPECT_THROW(fb::source_from_targets(1.0, 0.6), fb::ValidationError);
}

TEST(BucketDetector, AppendixListing) {
    auto ops = fb::bucket_detector(fb::FockSpace(4), bucket(0.6, 0.001));
    const double click[] = {0.001, 0.601, 0.841, 0.937};
    const double none[] = {0.999, 0.399, 0.159, 0.063};
    for (int i = 0; i < 4; ++i) {
        EXPECT_NEAR(diag(ops.click)(i), click[i], 1e-4);
        EXPECT_NEAR(diag(ops.no_click)(i), none[i], 1e-4);
    }
}

TEST(BucketDetector, UnitAndZeroEfficiency) {
    auto ideal = fb::bucket_detector(fb::FockSpace(5), bucket(1.0));
    EXPECT_EQ(diag(ideal.click)(0), 0.0);
    for (int i = 1; i < 5; ++i) EXPECT_EQ(diag(ideal.click)(i), 1.0);
    auto blind = fb::bucket_detector(fb::FockSpace(5), bucket(0.0));
    EXPECT_EQ(diag(blind.click).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(diag(blind.no_click).minCoeff(), 1.0);
}

TEST(BucketDetector, ClampsAtSaturation) {
    auto ops = fb::bucket_detector(fb::FockSpace(4), bucket(1.0, 0.05));
    EXPECT_EQ(diag(ops.click)(3), 1.0);
    EXPECT_EQ(diag(ops.no_click)(3), 0.0);
    EXPECT_NEAR(diag(ops.click)(0), 0.05, 1e-15);
}

TEST(SpdDetector, ResolvesSinglePhotons) {
    auto ideal = fb::spd_detector(fb::FockSpace(4), spd(1.0));
    EXPECT_EQ(diag(ideal.click)(0), 0.0);
    EXPECT_EQ(diag(ideal.click)(1), 1.0);
    EXPECT_EQ(diag(ideal.click)(2), 0.0);
    EXPECT_NEAR(spd(0.95).click(2), 0.095, 1e-12);
    auto half = fb::spd_detector(fb::FockSpace(4), spd(0.5));
    const double expect[] = {0.0, 0.5, 0.5, 0.375};
    for (int i = 0; i < 4; ++i) EXPECT_NEAR(diag(half.click)(i), expect[i], 1e-12);
}

TEST(Detectors, CompletenessWithoutDarkCounts) {
    for (double eta : {0.0, 0.3, 0.8, 1.0}) {
        for (auto m : {bucket(eta), spd(eta)}) {
            auto ops = fb::detector_operators(fb::FockSpace(6), m);
            Eigen::VectorXd sum = diag(ops.click) + diag(ops.no_click);
            if (m.kind == fb::DetectorKind::bucket) {
                EXPECT_NEAR((sum.array() - 1.0).abs().maxCoeff(), 0.0, 1e-12);
            } else {
                // Multi-photon events that are neither "exactly one" nor "none".
                EXPECT_LE(sum.maxCoeff(), 1.0 + 1e-12);
                EXPECT_NEAR(sum(0), 1.0, 1e-12);
                EXPECT_NEAR(sum(1), 1.0, 1e-12);
            }
        }
    }
}

TEST(Spdc, AppendixAmplitudes) {
    auto psi = fb::spdc_state({0.4}, fb::FockSpace(4));
    auto amp = [&](int n) { return psi.amplitude(std::vector<int>{n, n}); };
    EXPECT_NEAR(std::abs(amp(0) - Complex(0.925, 0)), 0.0, 1e-4);
    EXPECT_NEAR(std::abs(amp(1) - Complex(0, -0.35162)), 0.0, 1e-4);
    EXPECT_NEAR(std::abs(amp(2) - Complex(-0.13218, 0)), 0.0, 1e-4);
    EXPECT_NEAR(std::abs(amp(3) - Complex(0, 0.057186)), 0.0, 1e-4);
}

TEST(Spdc, ZeroSqueezingIsIdentity) {
    auto u = fb::spdc_unitary({0.0}, fb::FockSpace(3));
    EXPECT_NEAR((u.matrix() - fb::CMatrix::Identity(9, 9)).cwiseAbs().maxCoeff(), 0.0, 1e-14);
}

TEST(Spdc, ConvergesToTwoModeSqueezedVacuum) {
    auto psi = fb::spdc_state({0.4}, fb::FockSpace(8));
    const double expect = std::tanh(0.4) / std::cosh(0.4);
    EXPECT_NEAR(std::abs(psi.amplitude(std::vector<int>{1, 1})), expect, 1e-3);
    auto small = fb::spdc_state({0.4}, fb::FockSpace(4));
    EXPECT_NEAR(std::abs(small.amplitude(std::vector<int>{0, 0})), std::abs(psi.amplitude(std::vector<int>{0, 0})), 1e-3);
    EXPECT_NEAR(std::abs(small.amplitude(std::vector<int>{1, 1})), std::abs(psi.amplitude(std::vector<int>{1, 1})), 1e-3);
}

TEST(HeraldSingle, IdealTriggerAtWeakPumpGivesSinglePhoton) {
    auto psi = fb::spdc_state({1e-3}, fb::FockSpace(4));
    auto h = fb::herald_single(psi, spd(1.0));
    ASSERT_TRUE(h.heralded);
    EXPECT_NEAR(h.heralded->single_photon_fraction(), 1.0, 1e-9);
    EXPECT_NEAR(h.heralded->g2(), 0.0, 1e-9);
}

TEST(HeraldSingle, BucketTriggerWeights) {
    auto psi = fb::spdc_state({0.4}, fb::FockSpace(4));
    auto h = fb::herald_single(psi, bucket(0.8));
    ASSERT_TRUE(h.heralded);
    const double c2[] = {0.925 * 0.925, 0.35162 * 0.35162, 0.13218 * 0.13218, 0.057186 * 0.057186};
    double p = 0.0;
    for (int n = 1; n < 4; ++n) {
        const double w = (1.0 - std::pow(0.2, n)) * c2[n];
        EXPECT_NEAR(h.heralded->population(n), w, 1e-4);
        p += w;
    }
    EXPECT_NEAR(h.trigger_probability, p, 1e-4);
    EXPECT_NEAR(h.heralded->vacuum_weight, 1.0 - h.trigger_probability, 1e-12);
    EXPECT_NEAR(h.heralded->total_weight(), 1.0, 1e-10);
}

TEST(HeraldSingle, VacuumNeverTriggers) {
    auto h = fb::herald_single(fb::spdc_state({0.0}, fb::FockSpace(4)), spd(1.0));
    EXPECT_EQ(h.trigger_probability, 0.0);
    EXPECT_FALSE(h.heralded);
}

TEST(HeraldSingle, ImprovesPurity) {
    for (double e : {0.1, 0.4, 0.8}) {
        auto psi = fb::spdc_state({e}, fb::FockSpace(8));
        const double unheralded = fb::g2_zero(fb::partial_trace(psi, {1}));
        auto h = fb::herald_single(psi, spd(1.0));
        ASSERT_TRUE(h.heralded);
        EXPECT_LE(h.heralded->g2(), unheralded);
    }
}

TEST(Multiplex, Eq13Weights) {
    fb::HeraldedMixture m;
    m.vacuum_weight = 0.7;
    m.components = {{1, 0.25}, {2, 0.05}};
    auto id = fb::multiplex(m, 1);
    EXPECT_NEAR(id.vacuum_weight, 0.7, 1e-15);
    EXPECT_NEAR(id.population(1), 0.25, 1e-15);
    auto four = fb::multiplex(m, 4);
    EXPECT_NEAR(four.vacuum_weight, 0.2401, 1e-12);
    EXPECT_NEAR(four.population(1), 0.63325, 1e-5);
    EXPECT_NEAR(four.total_weight(), 1.0, 1e-12);
    // Relative weights are unchanged, so g2 scales by (1 - Q) / (1 - Q^S).
    EXPECT_NEAR(four.population(2) / four.population(1), 0.2, 1e-12);
    EXPECT_NEAR(four.g2(), m.g2() * 0.3 / (1 - 0.2401), 1e-12);
    EXPECT_NEAR(four.conditional_g2(), m.conditional_g2(), 1e-12);
    EXPECT_NEAR(fb::attenuate(four, 0.6).conditional_g2(), m.conditional_g2(), 1e-12);
    auto many = fb::multiplex(m, 200);
    EXPECT_NEAR(many.herald_probability(), 1.0, 1e-12);
}

TEST(Multiplex, NeverFiringStaysVacuum) {
    fb::HeraldedMixture m;
    auto out = fb::multiplex(m, 8);
    EXPECT_EQ(out.vacuum_weight, 1.0);
    EXPECT_TRUE(out.components.empty());
    EXPECT_THROW(fb::multiplex(m, 0), fb::ValidationError);
}

TEST(SwitchLoss, Schemes) {
    using S = fb::SwitchScheme;
    EXPECT_NEAR(fb::switch_loss({S::linear, 0.98, 128}), 0.98, 1e-15);
    EXPECT_NEAR(fb::switch_loss({S::binary, 0.98, 8}), 0.941192, 1e-12);
    EXPECT_NEAR(fb::switch_loss({S::binary, 0.98, 128}), std::pow(0.98, 7), 1e-15);
    EXPECT_NEAR(fb::switch_loss({S::multiport, 0.98, 128}), std::pow(0.98, 128), 1e-15);
    for (auto s : {S::linear, S::binary, S::multiport}) EXPECT_EQ(fb::switch_loss({s, 1.0, 64}), 1.0);
}

TEST(SwitchLoss, Dominance) {
    using S = fb::SwitchScheme;
    for (int n = 2; n <= 128; ++n) {
        const double a = fb::switch_loss({S::linear, 0.97, n});
        const double b = fb::switch_loss({S::binary, 0.97, n});
        const double c = fb::switch_loss({S::multiport, 0.97, n});
        EXPECT_GE(a, b);
        EXPECT_GE(b, c);
    }
}

TEST(LossChannel, SingleAndTwoPhoton) {
    fb::FockSpace s(3);
    fb::ModeRegister reg({s});
    const double t = 0.7;
    auto one = fb::loss_channel(fb::MixedState::from_pure(fb::number_state(s, 1)), t, 0).populations();
    EXPECT_NEAR(one(1), t, 1e-12);
    EXPECT_NEAR(one(0), 1 - t, 1e-12);
    auto two = fb::loss_channel(fb::MixedState::from_pure(fb::number_state(s, 2)), t, 0).populations();
    EXPECT_NEAR(two(2), t * t, 1e-12);
    EXPECT_NEAR(two(1), 2 * t * (1 - t), 1e-12);
    EXPECT_NEAR(two(0), (1 - t) * (1 - t), 1e-12);
    auto same = fb::loss_channel(fb::MixedState::from_pure(fb::number_state(s, 2)), 1.0, 0);
    EXPECT_NEAR(same.populations()(2), 1.0, 1e-15);
}

TEST(LossChannel, MatchesBeamsplitterDilation) {
    // |2> and a coherent superposition through a beamsplitter to an empty
    // environment mode, which is then traced out.
    fb::FockSpace s(3);
    const double t = 0.6, theta = std::acos(std::sqrt(t));
    fb::CVector v(3);
    v << 0.6, Complex(0.0, 0.48), 0.64;
    fb::PureState psi(fb::ModeRegister({s}), v);
    auto lossy = fb::loss_channel(fb::MixedState::from_pure(psi), t, 0);
    Eigen::Matrix2cd u;
    u << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
    auto lifted = fb::lift_transfer(fb::TransferMatrix(u), s);
    fb::PureState joint = fb::tensor({psi, fb::number_state(s, 0)});
    fb::PureState out(joint.reg(), lifted.matrix() * joint.amplitudes());
    auto reduced = fb::partial_trace(out, {0});
    EXPECT_NEAR((reduced.density() - lossy.density()).cwiseAbs().maxCoeff(), 0.0, 1e-10);
}

TEST(LossChannel, Composition) {
    fb::FockSpace s(4);
    fb::CVector v = fb::CVector::Constant(4, Complex(0.5, 0.0));
    auto rho = fb::MixedState::from_pure(fb::PureState(fb::ModeRegister({s}), v));
    auto twice = fb::loss_channel(fb::loss_channel(rho, 0.8, 0), 0.7, 0);
    auto once = fb::loss_channel(rho, 0.56, 0);
    EXPECT_NEAR((twice.density() - once.density()).cwiseAbs().maxCoeff(), 0.0, 1e-10);
}

TEST(Attenuate, MatchesLossChannelOnDiagonalMixtures) {
    fb::HeraldedMixture m;
    m.vacuum_weight = 0.5;
    m.components = {{1, 0.4}, {2, 0.1}};
    auto thinned = fb::attenuate(m, 0.9);
    auto via_channel = fb::loss_channel(m.to_state(fb::FockSpace(3)), 0.9, 0).populations();
    for (int n = 0; n < 3; ++n) EXPECT_NEAR(thinned.population(n), via_channel(n), 1e-12);
}

TEST(G2, LossRescalesMomentsByTransmittance) {
    // p1 -> t p1 + 2 t (1 - t) p2 and p2 -> t^2 p2, so <n> scales by t and
    // <n(n-1)> by t^2: g2 is unchanged.
    fb::FockSpace s(3);
    auto rho = fb::dephased_source({0.8, 0.3}, s);
    const double before = fb::g2_zero(rho);
    for (double t : {0.9, 0.5, 0.1}) {
        auto after = fb::loss_channel(rho, t, 0);
        auto p = after.populations();
        const double mean = p(1) + 2 * p(2);
        EXPECT_NEAR(mean, t * (rho.populations()(1) + 2 * rho.populations()(2)), 1e-12);
        EXPECT_NEAR(fb::g2_zero(after), before, 1e-10);
    }
}
