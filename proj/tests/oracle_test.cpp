#include "drslip/oracle.hpp"

#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "drslip/stats.hpp"
#include "test_util.hpp"

namespace drslip {
namespace {

constexpr double kPi = std::numbers::pi;
const ModelParams kModel{0.42, 9.81, 25.0};
const VerticalSinusoid kMotion{0.07, kPi, 0.0};

TEST(Integrate, ZeroInitialStateStaysZero) {
    const SampledTrajectory tr = integrate(kModel, kMotion, {0.0, 0.0}, 0.0, 0.5, 100);
    ASSERT_EQ(tr.size(), 100u);
    for (std::size_t i = 0; i < tr.size(); ++i) {
        EXPECT_EQ(tr.positions[i], 0.0);
        EXPECT_EQ(tr.velocities[i], 0.0);
    }
}

TEST(Integrate, SamplesAreEvenAndStrictlyIncreasing) {
    const SampledTrajectory tr = integrate(kModel, kMotion, {0.1, 0.0}, 0.0, 0.5, 1000);
    ASSERT_EQ(tr.times.size(), 1000u);
    ASSERT_EQ(tr.positions.size(), 1000u);
    ASSERT_EQ(tr.velocities.size(), 1000u);
    EXPECT_EQ(tr.times.front(), 0.0);
    EXPECT_EQ(tr.times.back(), 0.5);
    for (std::size_t i = 1; i < tr.size(); ++i) EXPECT_GT(tr.times[i], tr.times[i - 1]);
}

TEST(Integrate, ClassicalLimitMatchesCosh) {
    const double lambda = std::sqrt(9.81 / 0.42);
    const SampledTrajectory tr = integrate(kModel, VerticalSinusoid{0.0, kPi, 0.0}, {0.1, 0.0}, 0.0, 1.0, 201);
    for (std::size_t i = 0; i < tr.size(); ++i)
        EXPECT_LT(testing::rel_diff(tr.positions[i], 0.1 * std::cosh(lambda * tr.times[i])), 1e-8);
}

TEST(Integrate, TighterToleranceSelfConverges) {
    const IntegratorConfig loose{1e-9, 1e-9, 0.0, 1e-14};
    const IntegratorConfig tight{5e-10, 5e-10, 0.0, 1e-14};
    const IntegratorConfig reference{1e-13, 1e-13, 0.0, 1e-14};
    const auto a = integrate(kModel, kMotion, {0.1, -0.15}, 0.0, 0.5, 2, loose);
    const auto b = integrate(kModel, kMotion, {0.1, -0.15}, 0.0, 0.5, 2, tight);
    const auto r = integrate(kModel, kMotion, {0.1, -0.15}, 0.0, 0.5, 2, reference);
    EXPECT_LT(std::abs(a.positions.back() - b.positions.back()), 10 * 1e-9);
    // Global error tracks the requested tolerance: 10x tighter, clearly smaller error.
    const auto c = integrate(kModel, kMotion, {0.1, -0.15}, 0.0, 0.5, 2, IntegratorConfig{1e-10, 1e-10, 0.0, 1e-14});
    const double err_a = std::abs(a.positions.back() - r.positions.back());
    const double err_c = std::abs(c.positions.back() - r.positions.back());
    EXPECT_LT(err_a, 1e-7);
    EXPECT_LT(err_c, err_a);
}

TEST(Integrate, DenseOutputAgreesWithSteppingToEachSample) {
    const auto dense = integrate(kModel, kMotion, {0.02, 0.1}, 0.0, 0.5, 1000);
    IntegratorConfig stepwise;
    stepwise.max_step = 0.5 / 999;
    const auto fine = integrate(kModel, kMotion, {0.02, 0.1}, 0.0, 0.5, 1000, stepwise);
    for (std::size_t i = 0; i < dense.size(); ++i) EXPECT_NEAR(dense.positions[i], fine.positions[i], 1e-9);
}

TEST(Integrate, StepUnderflowIsReported) {
    IntegratorConfig cfg{1e-10, 1e-10, 0.0, 0.3};
    EXPECT_THROW(integrate(kModel, kMotion, {0.1, 0.0}, 0.0, 2.0, 2, cfg), StepSizeUnderflowError);
}

TEST(Integrate, RejectsBadArguments) {
    EXPECT_THROW(integrate(kModel, kMotion, {0.1, 0.0}, 0.0, 0.5, 1), ConfigError);
    EXPECT_THROW(integrate(kModel, kMotion, {0.1, 0.0}, 0.5, 0.0, 10), ConfigError);
    EXPECT_THROW(integrate(kModel, kMotion, {0.1, 0.0}, 0.0, 0.5, 10, IntegratorConfig{0.1, 1e-9, 0, 1e-14}),
                 ConfigError);
}

TEST(Monodromy, ConstantCoefficientCase) {
    const MathieuParams p{-9.466293443155559, 0.0, kPi};
    EXPECT_NEAR(monodromy_exponent(p).mu.real(), std::sqrt(-p.c0), 1e-8);
}

TEST(Monodromy, AgreesWithClosedFormExponent) {
    const MathieuParams p = to_mathieu(kModel, kMotion);
    const CharacteristicExponent a = monodromy_exponent(p);
    const CharacteristicExponent b = characteristic_exponent(p);
    EXPECT_LT(std::abs(a.mu - b.mu) / std::abs(b.mu), 1e-6);
    EXPECT_NEAR(a.mu.real(), 3.0758708837847424, 1e-9);
}

// Liouville: the Wronskian of the fundamental pair stays 1. Over a full
// period the entries reach e^(mu pi), so ad - bc can only be resolved to a
// few ulps of the products; the half period keeps it well conditioned.
TEST(Monodromy, DeterminantIsOne) {
    SplitMix64 rng(53);
    for (int i = 0; i < 10; ++i) {
        const MathieuParams p =
            to_mathieu(ModelParams{rng.uniform(0.3, 0.55), 9.81, 1.0}, VerticalSinusoid{rng.uniform(0.0, 0.15), kPi, 0.0});
        const MonodromyResult r = monodromy(p);
        const double scale = std::abs(r.matrix[0][0] * r.matrix[1][1]);
        EXPECT_LE(std::abs(r.determinant() - 1.0), 1e-8 + 16 * std::numeric_limits<double>::epsilon() * scale);
        // Even equation: the two diagonal entries coincide.
        EXPECT_NEAR(r.matrix[0][0], r.matrix[1][1], 1e-9 * std::abs(r.matrix[0][0]));

        auto accel = [&](double tau, double x, double) { return -(p.c0 - 2.0 * p.c1 * std::cos(2.0 * tau)) * x; };
        const std::array<double, 1> half{kPi / 2};
        const IntegratorConfig cfg = MonodromyConfig{}.integrator;
        const State2 a = integrate_second_order(accel, 0.0, {1.0, 0.0}, half, cfg).front();
        const State2 b = integrate_second_order(accel, 0.0, {0.0, 1.0}, half, cfg).front();
        EXPECT_NEAR(a[0] * b[1] - a[1] * b[0], 1.0, 1e-8);
    }
}

TEST(Monodromy, BoundedRegionGivesImaginaryExponent) {
    const MathieuParams p = to_mathieu(ModelParams{0.4875, 9.81, 1.0}, VerticalSinusoid{0.6, 2 * kPi, 0.0});
    const MonodromyResult r = monodromy(p);
    EXPECT_LT(std::abs(r.trace() / 2), 1.0);
    EXPECT_NEAR(r.exponent.mu.real(), 0.0, 1e-9);
    const CharacteristicExponent b = characteristic_exponent(p);
    EXPECT_LT(std::abs(r.exponent.mu - b.mu) / std::abs(b.mu), 1e-6);
}

TEST(Compare, IdenticalInputsGiveZeroError) {
    const AnalyticSolution s = solve_analytic(kModel, kMotion, {0.1, 0.05});
    SampledTrajectory tr;
    tr.times = linspace(0.0, 0.5, 50);
    for (double t : tr.times) {
        tr.positions.push_back(s.evaluate(t).x);
        tr.velocities.push_back(s.evaluate(t).v);
    }
    const ErrorStats e = compare(s, tr);
    EXPECT_EQ(e.mean, 0.0);
    EXPECT_EQ(e.max, 0.0);
    EXPECT_EQ(e.sd, 0.0);
}

TEST(Compare, InitialInstantAgrees) {
    const AnalyticSolution s = solve_analytic(kModel, kMotion, {0.13, -0.07});
    const ErrorStats e = compare(s, integrate(kModel, kMotion, {0.13, -0.07}, 0.0, 0.5, 1000));
    EXPECT_LE(e.percent_errors.front(), 1e-8);
    EXPECT_LT(e.max, 0.02);
}

TEST(Compare, ZeroReferenceIsGuarded) {
    EXPECT_EQ(percent_error(0.0, 0.0), 0.0);
    EXPECT_DOUBLE_EQ(percent_error(1e-12, 0.0), 0.1);
}

TEST(Summary, SingleValueHasZeroSpread) {
    const std::vector<double> one{3.0};
    const Summary s = summarize(one);
    EXPECT_EQ(s.sd, 0.0);
    EXPECT_EQ(s.mean, 3.0);
}

}  // namespace
}  // namespace drslip
