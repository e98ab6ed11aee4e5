#pragma once

#include <array>
#include <cmath>

#include "drslip/error.hpp"
#include "drslip/geometry.hpp"

namespace drslip {

/// Degree-6 Bezier curve in 3-D, evaluated by de Casteljau.
struct BezierCurve {
    std::array<Vec3, 7> control{};

    Vec3 operator()(double s) const {
        std::array<Vec3, 7> p = control;
        for (std::size_t r = 1; r < p.size(); ++r)
            for (std::size_t i = 0; i + r < p.size(); ++i) p[i] = (1.0 - s) * p[i] + s * p[i + 1];
        return p[0];
    }

    /// d/ds, itself a degree-5 curve on the control-point differences.
    Vec3 derivative(double s) const {
        std::array<Vec3, 6> d;
        for (std::size_t i = 0; i < d.size(); ++i) d[i] = 6.0 * (control[i + 1] - control[i]);
        for (std::size_t r = 1; r < d.size(); ++r)
            for (std::size_t i = 0; i + r < d.size(); ++i) d[i] = (1.0 - s) * d[i] + s * d[i + 1];
        return d[0];
    }
};

// Bernstein weights at s = 1/2 for the three middle points: (15 + 20 + 15) / 64.
inline constexpr double kSwingApexGain = 64.0 / 50.0;

/// Swing template: endpoints tripled for zero velocity and acceleration at
/// lift-off and touchdown, middle points raised so the apex at s = 1/2 is
/// exactly `height`. z is clearance above the surface.
inline BezierCurve swing_curve(Vec2 from, Vec2 to, double height) {
    if (!(height > 0.0) || !std::isfinite(height)) throw ConfigError("swing: step height must be > 0");
    const Vec3 a{from.x, from.y, 0.0}, b{to.x, to.y, 0.0};
    const Vec3 mid = 0.5 * (a + b);
    const double h = kSwingApexGain * height;
    BezierCurve c;
    c.control = {a, a, Vec3{a.x, a.y, h}, Vec3{mid.x, mid.y, h}, Vec3{b.x, b.y, h}, b, b};
    return c;
}

}  // namespace drslip
