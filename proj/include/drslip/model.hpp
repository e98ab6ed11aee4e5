#pragma once

// Reduced-order model of a legged robot on a dynamic rigid surface (DRS):
// a linear inverted pendulum at constant height z0 above a support point
// that rides the moving surface. Under a vertical sinusoidal surface motion
// the horizontal dynamics reduce to Mathieu's equation
//
//     x'' + (c0 - 2 c1 cos 2 tau) x = 0,   tau = (pi/2 + omega t) / 2,
//
// with c0 = -4 g / (omega^2 z0) and c1 = 2 A / z0.

#include <cmath>
#include <numbers>
#include <string>
#include <variant>

#include "drslip/error.hpp"

namespace drslip {

struct ModelParams {
    double z0 = 0.42;  ///< CoM height above the support point [m]
    double g = 9.81;   ///< gravitational acceleration [m/s^2]
    double m = 25.0;   ///< total mass [kg]

    void validate() const {
        if (!(z0 > 0.0) || !std::isfinite(z0)) throw ConfigError("model: z0 must be positive");
        if (!(g > 0.0) || !std::isfinite(g)) throw ConfigError("model: g must be positive");
        if (!(m > 0.0) || !std::isfinite(m)) throw ConfigError("model: m must be positive");
    }
};

/// z_ws(t) = A sin(omega t + phase)
struct VerticalSinusoid {
    double amplitude = 0.0;  ///< [m]
    double omega = 1.0;      ///< [rad/s]
    double phase = 0.0;      ///< [rad]

    void validate() const {
        if (!(amplitude >= 0.0) || !std::isfinite(amplitude))
            throw ConfigError("surface: amplitude must be >= 0");
        if (!(omega > 0.0) || !std::isfinite(omega)) throw ConfigError("surface: omega must be > 0");
        if (!std::isfinite(phase)) throw ConfigError("surface: phase must be finite");
    }
};

/// Rotation about a horizontal axis; pitch(t) = pitch_amplitude sin(2 pi f t).
/// A contact point at distance r from the axis rises by r sin(pitch(t)).
struct Pitching {
    double pitch_amplitude = 0.0;   ///< [rad]
    double pitch_frequency = 0.5;   ///< [Hz]
    double reference_radius = 1.0;  ///< [m]

    void validate() const {
        if (!(pitch_amplitude >= 0.0) || !(pitch_amplitude < std::numbers::pi / 2))
            throw ConfigError("surface: pitch amplitude must lie in [0, pi/2)");
        if (!(pitch_frequency > 0.0) || !std::isfinite(pitch_frequency))
            throw ConfigError("surface: pitch frequency must be > 0");
        if (!(reference_radius > 0.0) || !std::isfinite(reference_radius))
            throw ConfigError("surface: reference radius must be > 0");
    }

    double pitch(double t) const {
        return pitch_amplitude * std::sin(2.0 * std::numbers::pi * pitch_frequency * t);
    }

    /// Same motion seen by a contact point at another radius.
    Pitching at_radius(double radius) const {
        Pitching p = *this;
        p.reference_radius = radius;
        return p;
    }
};

using SurfaceMotion = std::variant<VerticalSinusoid, Pitching>;

inline void validate(const SurfaceMotion& motion) {
    std::visit([](const auto& m) { m.validate(); }, motion);
}

/// Transformed Mathieu coefficients plus the frequency needed to map time.
struct MathieuParams {
    double c0 = -1.0;
    double c1 = 0.0;
    double omega = 1.0;

    bool operator==(const MathieuParams&) const = default;
};

struct PendulumState {
    double x = 0.0;  ///< CoM position relative to the support point [m]
    double v = 0.0;  ///< its time derivative [m/s]
};

// Pitch amplitudes at or above this are rejected by the vertical-sinusoid
// conversion; the neglected horizontal surface acceleration stops being small.
inline constexpr double kMaxPitchForVerticalApprox = 15.0 * std::numbers::pi / 180.0;

inline double surface_height(const VerticalSinusoid& s, double t) {
    return s.amplitude * std::sin(s.omega * t + s.phase);
}

inline double surface_height(const Pitching& p, double t) {
    return p.reference_radius * std::sin(p.pitch(t));
}

inline double surface_height(const SurfaceMotion& motion, double t) {
    return std::visit([t](const auto& m) { return surface_height(m, t); }, motion);
}

inline double surface_velocity(const VerticalSinusoid& s, double t) {
    return s.amplitude * s.omega * std::cos(s.omega * t + s.phase);
}

inline double surface_velocity(const Pitching& p, double t) {
    const double w = 2.0 * std::numbers::pi * p.pitch_frequency;
    const double th = p.pitch(t);
    const double th_dot = p.pitch_amplitude * w * std::cos(w * t);
    return p.reference_radius * std::cos(th) * th_dot;
}

inline double surface_velocity(const SurfaceMotion& motion, double t) {
    return std::visit([t](const auto& m) { return surface_velocity(m, t); }, motion);
}

inline double surface_accel(const VerticalSinusoid& s, double t) {
    return -s.amplitude * s.omega * s.omega * std::sin(s.omega * t + s.phase);
}

// d2/dt2 [r sin(th(t))] = r (cos(th) th'' - sin(th) th'^2)
inline double surface_accel(const Pitching& p, double t) {
    const double w = 2.0 * std::numbers::pi * p.pitch_frequency;
    const double th = p.pitch(t);
    const double th_dot = p.pitch_amplitude * w * std::cos(w * t);
    const double th_ddot = -p.pitch_amplitude * w * w * std::sin(w * t);
    return p.reference_radius * (std::cos(th) * th_ddot - std::sin(th) * th_dot * th_dot);
}

inline double surface_accel(const SurfaceMotion& motion, double t) {
    return std::visit([t](const auto& m) { return surface_accel(m, t); }, motion);
}

/// First-harmonic vertical sinusoid seen by the pitching contact point.
inline VerticalSinusoid equivalent_vertical_sinusoid(const Pitching& p) {
    p.validate();
    if (p.pitch_amplitude >= kMaxPitchForVerticalApprox)
        throw ConfigError("surface: pitch amplitude >= 15 deg is outside the vertical-motion approximation");
    return VerticalSinusoid{p.reference_radius * std::sin(p.pitch_amplitude),
                            2.0 * std::numbers::pi * p.pitch_frequency, 0.0};
}

inline VerticalSinusoid as_vertical_sinusoid(const SurfaceMotion& motion) {
    if (const auto* v = std::get_if<VerticalSinusoid>(&motion)) return *v;
    return equivalent_vertical_sinusoid(std::get<Pitching>(motion));
}

/// Mathieu coefficients of the horizontal DRS-LIP dynamics.
///
/// The mapping assumes zero surface phase; a nonzero phase only shifts the
/// time origin and is rejected here so that tau(t) stays as documented.
inline MathieuParams to_mathieu(const ModelParams& params, const VerticalSinusoid& motion) {
    params.validate();
    motion.validate();
    if (motion.phase != 0.0)
        throw ConfigError("to_mathieu: surface phase must be zero (shift the time origin instead)");
    const double w2 = motion.omega * motion.omega;
    return MathieuParams{-4.0 * params.g / (w2 * params.z0), 2.0 * motion.amplitude / params.z0, motion.omega};
}

/// tau = (pi/2 + omega t) / 2
inline double tau_of_t(double omega, double t) { return 0.5 * (std::numbers::pi / 2 + omega * t); }

inline double t_of_tau(double omega, double tau) { return (2.0 * tau - std::numbers::pi / 2) / omega; }

/// Leg axial force f_a = m (z_ws'' + g) / cos(theta), cos(theta) = z0 / |r_sc|.
inline double axial_force(const ModelParams& params, const VerticalSinusoid& motion, double x_sc, double y_sc,
                          double t) {
    const double len = std::sqrt(x_sc * x_sc + y_sc * y_sc + params.z0 * params.z0);
    const double cos_theta = params.z0 / len;
    return params.m * (surface_accel(motion, t) + params.g) / cos_theta;
}

}  // namespace drslip
