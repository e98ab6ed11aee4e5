#include "drslip/model.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "drslip/stats.hpp"

namespace drslip {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDeg = kPi / 180.0;

TEST(SurfaceHeight, VerticalSinusoidQuarterPeriod) {
    EXPECT_NEAR(surface_height(VerticalSinusoid{0.07, kPi, 0.0}, 0.5), 0.07, 1e-15);
    EXPECT_EQ(surface_height(VerticalSinusoid{0.10, kPi, 0.0}, 0.0), 0.0);
}

TEST(SurfaceHeight, PitchingUsesExactRadiusFormula) {
    // 1.0 * sin(5 deg * sin(pi * 0.5)), evaluated independently.
    EXPECT_NEAR(surface_height(Pitching{5 * kDeg, 0.5, 1.0}, 0.5), 0.08715574274765817, 1e-15);
}

TEST(SurfaceAccel, VerticalSinusoidExamples) {
    EXPECT_NEAR(surface_accel(VerticalSinusoid{0.07, kPi, 0.0}, 0.5), -0.6908723080762551, 1e-14);
    EXPECT_EQ(surface_accel(VerticalSinusoid{0.3, 2.0, 0.0}, 0.0), 0.0);
}

// Central second difference of the height with a 1e-4 s step, compared
// against the acceleration amplitude of the motion.
TEST(SurfaceAccel, MatchesFiniteDifferencesOfHeight) {
    SplitMix64 rng(7);
    const double h = 1e-4;
    for (int i = 0; i < 100; ++i) {
        SurfaceMotion motion;
        double scale;
        if (i % 2 == 0) {
            const VerticalSinusoid v{rng.uniform(0.01, 0.5), rng.uniform(2.5, 2 * kPi), rng.uniform(-1.0, 1.0)};
            scale = v.amplitude * v.omega * v.omega;
            motion = v;
        } else {
            const Pitching p{rng.uniform(1, 14) * kDeg, rng.uniform(0.4, 1.0), rng.uniform(0.5, 2.0)};
            const double w = 2 * kPi * p.pitch_frequency;
            scale = p.reference_radius * p.pitch_amplitude * w * w;
            motion = p;
        }
        const double t = rng.uniform(-5.0, 5.0);
        const double fd =
            (surface_height(motion, t + h) - 2 * surface_height(motion, t) + surface_height(motion, t - h)) / (h * h);
        EXPECT_LT(std::abs(fd - surface_accel(motion, t)) / scale, 1e-6) << "sample " << i;
    }
}

TEST(SurfaceVelocity, MatchesFiniteDifferencesOfHeight) {
    const SurfaceMotion motion = Pitching{5 * kDeg, 0.4, 1.3};
    const double h = 1e-6;
    for (double t : {0.0, 0.3, 1.1, 2.9}) {
        const double fd = (surface_height(motion, t + h) - surface_height(motion, t - h)) / (2 * h);
        EXPECT_NEAR(fd, surface_velocity(motion, t), 1e-8);
    }
}

TEST(EquivalentVerticalSinusoid, FirstHarmonicAmplitudeAndFrequency) {
    const VerticalSinusoid v = equivalent_vertical_sinusoid(Pitching{5 * kDeg, 0.5, 1.0});
    EXPECT_NEAR(v.amplitude, std::sin(5 * kDeg), 1e-15);
    EXPECT_NEAR(v.amplitude, 0.0872, 1e-4);
    EXPECT_DOUBLE_EQ(v.omega, kPi);
    EXPECT_EQ(equivalent_vertical_sinusoid(Pitching{0.0, 0.7, 2.0}).amplitude, 0.0);
    EXPECT_DOUBLE_EQ(equivalent_vertical_sinusoid(Pitching{5 * kDeg, 0.4, 1.0}).omega, 0.8 * kPi);
}

TEST(EquivalentVerticalSinusoid, RejectsLargePitch) {
    EXPECT_THROW(equivalent_vertical_sinusoid(Pitching{15 * kDeg, 0.5, 1.0}), ConfigError);
    EXPECT_THROW(equivalent_vertical_sinusoid(Pitching{30 * kDeg, 0.5, 1.0}), ConfigError);
    EXPECT_NO_THROW(equivalent_vertical_sinusoid(Pitching{14.9 * kDeg, 0.5, 1.0}));
}

TEST(ToMathieu, NominalAccuracyParameters) {
    const MathieuParams p = to_mathieu(ModelParams{0.42, 9.81, 25.0}, VerticalSinusoid{0.07, kPi, 0.0});
    EXPECT_NEAR(p.c0, -9.466293443155559, 1e-13);
    EXPECT_NEAR(p.c1, 1.0 / 3.0, 1e-15);
    EXPECT_EQ(p.omega, kPi);
}

TEST(ToMathieu, ZeroAmplitudeAndScaling) {
    const ModelParams base{0.42, 9.81, 25.0};
    EXPECT_EQ(to_mathieu(base, VerticalSinusoid{0.0, 2.0, 0.0}).c1, 0.0);

    const VerticalSinusoid s{0.05, 2.0, 0.0};
    const MathieuParams a = to_mathieu(base, s);
    const MathieuParams b = to_mathieu(ModelParams{0.84, 9.81, 25.0}, s);
    EXPECT_NEAR(b.c1, a.c1 / 2, 1e-15);
    EXPECT_NEAR(b.c0, a.c0 / 2, 1e-14);
}

TEST(ToMathieu, SignInvariants) {
    SplitMix64 rng(11);
    for (int i = 0; i < 200; ++i) {
        const ModelParams m{rng.uniform(0.2, 1.0), rng.uniform(1.0, 20.0), 1.0};
        const double amp = i % 5 == 0 ? 0.0 : rng.uniform(0.0, 1.0);
        const MathieuParams p = to_mathieu(m, VerticalSinusoid{amp, rng.uniform(0.1, 10.0), 0.0});
        EXPECT_LT(p.c0, 0.0);
        EXPECT_EQ(p.c1 == 0.0, amp == 0.0);
    }
}

TEST(ToMathieu, RejectsInvalidInputs) {
    EXPECT_THROW(to_mathieu(ModelParams{0.0, 9.81, 1.0}, VerticalSinusoid{0.1, 1.0, 0.0}), ConfigError);
    EXPECT_THROW(to_mathieu(ModelParams{0.4, 9.81, 1.0}, VerticalSinusoid{-0.1, 1.0, 0.0}), ConfigError);
    EXPECT_THROW(to_mathieu(ModelParams{0.4, 9.81, 1.0}, VerticalSinusoid{0.1, 0.0, 0.0}), ConfigError);
}

TEST(TimeMapping, RoundTrip) {
    SplitMix64 rng(3);
    for (int i = 0; i < 100; ++i) {
        const double w = rng.uniform(0.1, 10.0);
        const double t = rng.uniform(-10.0, 10.0);
        EXPECT_NEAR(t_of_tau(w, tau_of_t(w, t)), t, 1e-12);
    }
    EXPECT_DOUBLE_EQ(tau_of_t(kPi, 0.0), kPi / 4);
}

TEST(AxialForce, Examples) {
    const ModelParams m{0.42, 9.81, 25.0};
    EXPECT_DOUBLE_EQ(axial_force(m, VerticalSinusoid{0.0, kPi, 0.0}, 0.0, 0.0, 0.3), 25.0 * 9.81);
    EXPECT_NEAR(axial_force(m, VerticalSinusoid{0.07, kPi, 0.0}, 0.0, 0.0, 0.5), 227.97819229809363, 1e-10);
    // Leaning leg: cos(theta) = z0 / |r|.
    const double len = std::sqrt(0.1 * 0.1 + 0.05 * 0.05 + 0.42 * 0.42);
    EXPECT_NEAR(axial_force(m, VerticalSinusoid{0.0, kPi, 0.0}, 0.1, 0.05, 0.0), 25.0 * 9.81 * len / 0.42, 1e-10);
}

TEST(AxialForce, PositiveWheneverNetVerticalAccelerationIsPositive) {
    SplitMix64 rng(5);
    const ModelParams m{0.42, 9.81, 25.0};
    for (int i = 0; i < 100; ++i) {
        const VerticalSinusoid s{rng.uniform(0.0, 0.2), rng.uniform(0.5, 6.0), 0.0};
        const double t = rng.uniform(0.0, 10.0);
        if (surface_accel(s, t) > -m.g) {
            EXPECT_GT(axial_force(m, s, rng.uniform(-0.2, 0.2), 0.0, t), 0.0);
        }
    }
}

}  // namespace
}  // namespace drslip
