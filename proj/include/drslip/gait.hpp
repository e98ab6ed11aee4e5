#pragma once

// Walking-gait description: user parameters, named presets, and the
// per-phase support schedule derived from them.

#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "drslip/error.hpp"
#include "drslip/geometry.hpp"
#include "drslip/model.hpp"

namespace drslip {

enum class Foot { FR = 0, FL = 1, RR = 2, RL = 3 };

inline constexpr std::array<Foot, 4> kAllFeet{Foot::FR, Foot::FL, Foot::RR, Foot::RL};

inline constexpr unsigned foot_bit(Foot f) { return 1u << static_cast<unsigned>(f); }
inline constexpr unsigned kAllFeetMask = 0xFu;

inline std::string_view to_string(Foot f) {
    switch (f) {
        case Foot::FR: return "FR";
        case Foot::FL: return "FL";
        case Foot::RR: return "RR";
        case Foot::RL: return "RL";
    }
    return "?";
}

inline Foot foot_from_string(std::string_view s) {
    for (Foot f : kAllFeet)
        if (to_string(f) == s) return f;
    throw ConfigError("gait: unknown foot '" + std::string(s) + "' (expected FR, FL, RR or RL)");
}

struct GaitParams {
    double friction_coefficient = 0.5;
    double z0 = 0.42;            ///< [m]
    double gait_period = 2.0;    ///< [s]
    double avg_velocity = 0.05;  ///< [m/s] along +x
    double step_length = 0.10;   ///< [m]
    double max_step_height = 0.05;
    /// Foot positions at the start of the cycle, indexed by Foot.
    std::array<Vec2, 4> initial_footholds{Vec2{0.2, -0.15}, Vec2{0.2, 0.15}, Vec2{-0.2, -0.15}, Vec2{-0.2, 0.15}};
    /// Which foot swings in each of the four phases.
    std::array<Foot, 4> contact_sequence{Foot::FR, Foot::RL, Foot::FL, Foot::RR};

    double stride() const { return step_length; }
    double phase_duration() const { return gait_period / 4.0; }

    void validate() const {
        auto positive = [](double v, const char* what) {
            if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string("gait: ") + what + " must be > 0");
        };
        positive(friction_coefficient, "friction_coefficient");
        positive(z0, "z0");
        positive(gait_period, "gait_period");
        positive(step_length, "step_length");
        positive(max_step_height, "max_step_height");
        if (!std::isfinite(avg_velocity)) throw ConfigError("gait: avg_velocity must be finite");
        // Each foot advances one step per cycle, so the stride fixes the speed.
        if (std::abs(avg_velocity * gait_period - step_length) > 1e-9)
            throw ConfigError("gait: avg_velocity * gait_period must equal step_length");
        unsigned seen = 0;
        for (Foot f : contact_sequence) seen |= foot_bit(f);
        if (seen != kAllFeetMask) throw ConfigError("gait: contact_sequence must list every foot exactly once");
        for (const Vec2& p : initial_footholds)
            if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw ConfigError("gait: footholds must be finite");
    }
};

/// Table presets (G1) and (G2).
inline GaitParams gait_preset(std::string_view name) {
    GaitParams g;
    if (name == "G1") return g;
    if (name == "G2") {
        g.gait_period = 2.5;
        g.avg_velocity = 0.06;
        g.step_length = 0.15;
        g.max_step_height = 0.04;
        return g;
    }
    throw ConfigError("gait: unknown preset '" + std::string(name) + "' (expected G1 or G2)");
}

/// Surface presets. The pitching radii put the support point's vertical
/// excursion at 7 cm (DRS2) and 12.5 cm (DRS3).
inline SurfaceMotion surface_preset(std::string_view name) {
    constexpr double deg = std::numbers::pi / 180.0;
    if (name == "DRS1") return VerticalSinusoid{0.10, std::numbers::pi, 0.0};
    if (name == "DRS2") return Pitching{5.0 * deg, 0.5, 0.07 / std::sin(5.0 * deg)};
    if (name == "DRS3") return Pitching{5.0 * deg, 0.4, 0.125 / std::sin(5.0 * deg)};
    throw ConfigError("surface: unknown preset '" + std::string(name) + "' (expected DRS1, DRS2 or DRS3)");
}

/// Surface height under horizontal position x. For pitching, the axis sits
/// at x = -reference_radius.
inline double surface_height_at(const SurfaceMotion& motion, double x, double t) {
    if (const auto* p = std::get_if<Pitching>(&motion)) return (p->reference_radius + x) * std::sin(p->pitch(t));
    return surface_height(std::get<VerticalSinusoid>(motion), t);
}

inline double surface_pitch(const SurfaceMotion& motion, double t) {
    if (const auto* p = std::get_if<Pitching>(&motion)) return p->pitch(t);
    return 0.0;
}

/// Vertical sinusoid driving the pendulum whose support point is at x.
inline VerticalSinusoid dynamics_at(const SurfaceMotion& motion, double x) {
    if (const auto* p = std::get_if<Pitching>(&motion)) {
        const double r = p->reference_radius + x;
        if (!(r > 0.0)) throw ConfigError("surface: support point lies behind the pitching axis");
        return equivalent_vertical_sinusoid(p->at_radius(r));
    }
    return std::get<VerticalSinusoid>(motion);
}

inline double surface_period(const SurfaceMotion& motion) {
    if (const auto* p = std::get_if<Pitching>(&motion)) return 1.0 / p->pitch_frequency;
    return 2.0 * std::numbers::pi / std::get<VerticalSinusoid>(motion).omega;
}

/// The surface period must be an integer multiple of the gait period.
inline void check_commensurate(const GaitParams& gait, const SurfaceMotion& motion) {
    const double q = surface_period(motion) / gait.gait_period;
    if (std::abs(q - std::round(q)) > 1e-9 || std::round(q) < 1.0)
        throw ConfigError("gait: surface period / gait period must be a positive integer");
}

struct PhaseSpec {
    int index = 0;
    double t_start = 0.0;
    double duration = 0.0;
    Foot swing = Foot::FR;
    unsigned support_mask = 0;
    std::array<Vec2, 4> feet{};  ///< all foot positions during the phase (swing foot: lift-off point)
    Vec2 landing{};              ///< where the swing foot touches down
    std::vector<Vec2> polygon;   ///< CCW hull of the stance feet
    Vec2 support_point{};        ///< area centroid of the polygon
    VerticalSinusoid dynamics;   ///< surface motion seen at the support point

    double t_end() const { return t_start + duration; }
};

/// Four single-swing phases of one cycle. Each swing foot lands step_length
/// further along +x.
inline std::array<PhaseSpec, 4> build_phases(const GaitParams& gait, const SurfaceMotion& motion) {
    gait.validate();
    validate(motion);
    std::array<PhaseSpec, 4> phases;
    std::array<Vec2, 4> feet = gait.initial_footholds;
    for (int k = 0; k < 4; ++k) {
        PhaseSpec& ph = phases[k];
        ph.index = k;
        ph.t_start = k * gait.phase_duration();
        ph.duration = gait.phase_duration();
        ph.swing = gait.contact_sequence[k];
        ph.support_mask = kAllFeetMask & ~foot_bit(ph.swing);
        ph.feet = feet;
        std::vector<Vec2> stance;
        for (Foot f : kAllFeet)
            if (f != ph.swing) stance.push_back(feet[static_cast<int>(f)]);
        ph.polygon = convex_hull(stance);
        if (polygon_degenerate(ph.polygon))
            throw InfeasiblePlanError("gait: support polygon of phase " + std::to_string(k + 1) + " is degenerate");
        ph.support_point = polygon_centroid(ph.polygon);
        ph.dynamics = dynamics_at(motion, ph.support_point.x);
        Vec2& f = feet[static_cast<int>(ph.swing)];
        f.x += gait.step_length;
        ph.landing = f;
    }
    return phases;
}

}  // namespace drslip
