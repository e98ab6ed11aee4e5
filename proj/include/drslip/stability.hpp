#pragma once

// Floquet stability of the DRS-LIP. The exponent pair of the undamped
// equation is {-mu, +mu}, so the model can at best be marginally stable.

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "drslip/mathieu.hpp"
#include "drslip/model.hpp"

namespace drslip {

enum class Classification { Stable, Unstable, Marginal };

inline const char* to_string(Classification c) {
    switch (c) {
        case Classification::Stable: return "Stable";
        case Classification::Unstable: return "Unstable";
        case Classification::Marginal: return "Marginal";
    }
    return "?";
}

struct StabilityReport {
    cplx mu1;  ///< Re <= 0 member
    cplx mu2;  ///< Re >= 0 member
    Classification classification = Classification::Unstable;
};

inline constexpr double kMarginalTol = 1e-9;

inline StabilityReport classify_exponent(const CharacteristicExponent& e, double tol = kMarginalTol) {
    StabilityReport r;
    r.mu2 = e.mu;
    r.mu1 = -e.mu;
    if (r.mu1.real() < 0.0 && r.mu2.real() < 0.0)
        r.classification = Classification::Stable;
    else if (std::abs(r.mu2.real()) <= tol)
        r.classification = Classification::Marginal;
    else
        r.classification = Classification::Unstable;
    return r;
}

inline StabilityReport classify(const MathieuParams& p, double tol = kMarginalTol, const SeriesConfig& cfg = {}) {
    return classify_exponent(characteristic_exponent(p, cfg), tol);
}

inline StabilityReport classify(const ModelParams& params, const VerticalSinusoid& motion, double tol = kMarginalTol,
                                const SeriesConfig& cfg = {}) {
    return classify(to_mathieu(params, motion), tol, cfg);
}

/// One axis of a sweep grid. With `open_lower`, the points are
/// lo + (hi - lo) k / count for k = 1..count, so lo itself is excluded;
/// otherwise count points spaced evenly over [lo, hi].
struct SweepAxis {
    double lo = 0.0;
    double hi = 1.0;
    int count = 5;
    bool open_lower = false;

    std::vector<double> values() const {
        std::vector<double> v(static_cast<std::size_t>(count));
        for (int k = 0; k < count; ++k) {
            if (open_lower)
                v[k] = lo + (hi - lo) * (k + 1) / count;
            else
                v[k] = count == 1 ? lo : lo + (hi - lo) * k / (count - 1);
        }
        return v;
    }
};

struct SweepGrid {
    SweepAxis amplitude{0.0, 1.0, 5, true};                     ///< [m]
    SweepAxis omega{0.0, 2.0 * std::numbers::pi, 5, true};      ///< [rad/s]
    SweepAxis z0{0.30, 0.55, 5, false};                         ///< [m]
    double omega_min = 0.1;  ///< frequencies below this are rejected (c0 blows up as omega -> 0)

    void validate() const {
        for (const SweepAxis* a : {&amplitude, &omega, &z0}) {
            if (a->count < 1) throw ConfigError("sweep: axis counts must be >= 1");
            if (!(a->hi >= a->lo) || !std::isfinite(a->lo) || !std::isfinite(a->hi))
                throw ConfigError("sweep: axis ranges must satisfy lo <= hi");
        }
        if (!(omega_min > 0.0)) throw ConfigError("sweep: omega_min must be positive");
        for (double w : omega.values())
            if (w < omega_min) throw ConfigError("sweep: frequency below omega_min");
        for (double a : amplitude.values())
            if (a < 0.0) throw ConfigError("sweep: amplitudes must be >= 0");
        for (double z : z0.values())
            if (!(z > 0.0)) throw ConfigError("sweep: heights must be > 0");
    }

    std::size_t size() const {
        return static_cast<std::size_t>(amplitude.count) * omega.count * z0.count;
    }
};

struct SweepRow {
    double amplitude = 0.0;
    double omega = 0.0;
    double z0 = 0.0;
    cplx mu2;
    Classification classification = Classification::Unstable;
    std::string error;  ///< non-empty when this point failed

    double re_mu2() const { return mu2.real(); }
};

/// Classifies every grid point. Rows are ordered amplitude-major, then omega,
/// then z0, regardless of thread count.
inline std::vector<SweepRow> sweep(const SweepGrid& grid, double g = 9.81, unsigned threads = 1,
                                   double tol = kMarginalTol, const SeriesConfig& cfg = {}) {
    grid.validate();
    const auto as = grid.amplitude.values();
    const auto ws = grid.omega.values();
    const auto zs = grid.z0.values();
    std::vector<SweepRow> rows(grid.size());
    for (std::size_t i = 0; i < as.size(); ++i)
        for (std::size_t j = 0; j < ws.size(); ++j)
            for (std::size_t k = 0; k < zs.size(); ++k) {
                SweepRow& r = rows[(i * ws.size() + j) * zs.size() + k];
                r.amplitude = as[i];
                r.omega = ws[j];
                r.z0 = zs[k];
            }

    auto work = [&](std::size_t begin, std::size_t stride) {
        for (std::size_t idx = begin; idx < rows.size(); idx += stride) {
            SweepRow& r = rows[idx];
            try {
                const ModelParams model{r.z0, g, 1.0};
                const StabilityReport rep = classify(model, VerticalSinusoid{r.amplitude, r.omega, 0.0}, tol, cfg);
                r.mu2 = rep.mu2;
                r.classification = rep.classification;
            } catch (const Error& e) {
                r.error = e.what();
            }
        }
    };
    threads = std::max(1u, threads);
    if (threads == 1) {
        work(0, 1);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
    }
    return rows;
}

/// First instant on a 1 ms grid at which |x(t)| exceeds the threshold.
inline std::optional<double> divergence_time(const AnalyticSolution& solution, double horizon, double threshold) {
    constexpr double dt = 1e-3;
    const auto steps = static_cast<long>(std::floor(horizon / dt + 1e-9));
    for (long i = 0; i <= steps; ++i) {
        const double t = i * dt;
        if (std::abs(solution.evaluate(t).x) > threshold) return t;
    }
    return std::nullopt;
}

inline std::optional<double> divergence_demo(const ModelParams& params, const VerticalSinusoid& motion,
                                             const PendulumState& ic, double horizon, double threshold,
                                             const SeriesConfig& cfg = {}) {
    if (ic.x == 0.0 && ic.v == 0.0) return std::nullopt;
    return divergence_time(solve_analytic(params, motion, ic, cfg), horizon, threshold);
}

}  // namespace drslip
