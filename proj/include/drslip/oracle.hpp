#pragma once

// Reference computations independent of the series solution: an adaptive
// Dormand-Prince 5(4) integrator with continuous output, trajectory sampling
// of the DRS-LIP, and Floquet exponents from the monodromy matrix.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <vector>

#include "drslip/error.hpp"
#include "drslip/mathieu.hpp"
#include "drslip/model.hpp"
#include "drslip/stats.hpp"

namespace drslip {

struct IntegratorConfig {
    double rel_tol = 1e-9;
    double abs_tol = 1e-9;
    double max_step = 0.0;  ///< 0: no limit beyond the integration span
    double min_step = 1e-14;

    void validate() const {
        if (!(rel_tol > 0.0 && rel_tol <= 1e-2)) throw ConfigError("integrator: rel_tol must lie in (0, 1e-2]");
        if (!(abs_tol > 0.0 && abs_tol <= 1e-2)) throw ConfigError("integrator: abs_tol must lie in (0, 1e-2]");
        if (max_step < 0.0) throw ConfigError("integrator: max_step must be >= 0");
    }
};

using State2 = std::array<double, 2>;

struct IntegrationStats {
    int accepted = 0;
    int rejected = 0;
    int rhs_evaluations = 0;
};

namespace detail {

// Dormand & Prince (1980) coefficients with Hairer's dense-output weights.
struct Dopri5 {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                            a76 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                            e6 = 22.0 / 525, e7 = -1.0 / 40;
    static constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                            d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                            d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;
};

}  // namespace detail

/// Integrates x'' = accel(t, x, x') and reports the state at each requested
/// time. `out_times` must be sorted ascending with out_times[0] >= t0.
template <class Accel>
std::vector<State2> integrate_second_order(Accel&& accel, double t0, State2 y0, std::span<const double> out_times,
                                           const IntegratorConfig& cfg, IntegrationStats* stats = nullptr) {
    using K = detail::Dopri5;
    cfg.validate();
    std::vector<State2> out;
    out.reserve(out_times.size());
    if (out_times.empty()) return out;
    if (out_times.front() < t0) throw ConfigError("integrate: output times precede t0");
    for (std::size_t i = 1; i < out_times.size(); ++i)
        if (out_times[i] < out_times[i - 1]) throw ConfigError("integrate: output times must be sorted");

    IntegrationStats local;
    auto f = [&](double t, const State2& y) {
        ++local.rhs_evaluations;
        return State2{y[1], accel(t, y[0], y[1])};
    };
    auto axpy = [](const State2& y, double h, std::initializer_list<std::pair<double, const State2*>> terms) {
        State2 r = y;
        for (const auto& [w, k] : terms)
            for (int i = 0; i < 2; ++i) r[i] += h * w * (*k)[i];
        return r;
    };
    auto err_norm = [&](const State2& e, const State2& ya, const State2& yb) {
        double s = 0.0;
        for (int i = 0; i < 2; ++i) {
            const double sc = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(ya[i]), std::abs(yb[i]));
            s += (e[i] / sc) * (e[i] / sc);
        }
        return std::sqrt(s / 2.0);
    };

    const double t_end = out_times.back();
    std::size_t next = 0;
    while (next < out_times.size() && out_times[next] == t0) {
        out.push_back(y0);
        ++next;
    }
    if (next == out_times.size()) {
        if (stats) *stats = local;
        return out;
    }

    const double span = t_end - t0;
    const double h_max = cfg.max_step > 0.0 ? std::min(cfg.max_step, span) : span;

    double t = t0;
    State2 y = y0;
    State2 k1 = f(t, y);

    // Initial step (Hairer, Norsett & Wanner, II.4).
    double h;
    {
        double d0 = 0.0, d1 = 0.0;
        for (int i = 0; i < 2; ++i) {
            const double sc = cfg.abs_tol + cfg.rel_tol * std::abs(y[i]);
            d0 += (y[i] / sc) * (y[i] / sc);
            d1 += (k1[i] / sc) * (k1[i] / sc);
        }
        d0 = std::sqrt(d0 / 2.0);
        d1 = std::sqrt(d1 / 2.0);
        double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
        h0 = std::min(h0, h_max);
        const State2 y1 = axpy(y, h0, {{1.0, &k1}});
        const State2 k2 = f(t + h0, y1);
        double d2 = 0.0;
        for (int i = 0; i < 2; ++i) {
            const double sc = cfg.abs_tol + cfg.rel_tol * std::abs(y[i]);
            d2 += ((k2[i] - k1[i]) / sc) * ((k2[i] - k1[i]) / sc);
        }
        d2 = std::sqrt(d2 / 2.0) / h0;
        const double dm = std::max(d1, d2);
        const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 1.0 / 5.0);
        h = std::min({100.0 * h0, h1, h_max});
    }

    bool last_rejected = false;
    while (next < out_times.size()) {
        if (h < cfg.min_step) throw StepSizeUnderflowError("integrate: step size fell below the minimum");
        const bool final_step = t + h >= t_end;
        if (final_step) h = t_end - t;

        const State2 k2 = f(t + K::c2 * h, axpy(y, h, {{K::a21, &k1}}));
        const State2 k3 = f(t + K::c3 * h, axpy(y, h, {{K::a31, &k1}, {K::a32, &k2}}));
        const State2 k4 = f(t + K::c4 * h, axpy(y, h, {{K::a41, &k1}, {K::a42, &k2}, {K::a43, &k3}}));
        const State2 k5 =
            f(t + K::c5 * h, axpy(y, h, {{K::a51, &k1}, {K::a52, &k2}, {K::a53, &k3}, {K::a54, &k4}}));
        const State2 k6 = f(t + h, axpy(y, h, {{K::a61, &k1}, {K::a62, &k2}, {K::a63, &k3}, {K::a64, &k4},
                                               {K::a65, &k5}}));
        const State2 y_new =
            axpy(y, h, {{K::a71, &k1}, {K::a73, &k3}, {K::a74, &k4}, {K::a75, &k5}, {K::a76, &k6}});
        const State2 k7 = f(t + h, y_new);

        State2 e{};
        for (int i = 0; i < 2; ++i)
            e[i] = h * (K::e1 * k1[i] + K::e3 * k3[i] + K::e4 * k4[i] + K::e5 * k5[i] + K::e6 * k6[i] +
                        K::e7 * k7[i]);
        const double err = err_norm(e, y, y_new);

        if (err <= 1.0) {
            ++local.accepted;
            const double t_new = final_step ? t_end : t + h;
            // Continuous extension on [t, t_new].
            std::array<State2, 5> rc{};
            for (int i = 0; i < 2; ++i) {
                const double ydiff = y_new[i] - y[i];
                const double bspl = h * k1[i] - ydiff;
                rc[0][i] = y[i];
                rc[1][i] = ydiff;
                rc[2][i] = bspl;
                rc[3][i] = ydiff - h * k7[i] - bspl;
                rc[4][i] = h * (K::d1 * k1[i] + K::d3 * k3[i] + K::d4 * k4[i] + K::d5 * k5[i] + K::d6 * k6[i] +
                                K::d7 * k7[i]);
            }
            while (next < out_times.size() && (out_times[next] <= t_new || final_step)) {
                const double th = (out_times[next] - t) / h;
                const double th1 = 1.0 - th;
                State2 yo{};
                for (int i = 0; i < 2; ++i)
                    yo[i] = rc[0][i] + th * (rc[1][i] + th1 * (rc[2][i] + th * (rc[3][i] + th1 * rc[4][i])));
                if (out_times[next] == t_new) yo = y_new;
                out.push_back(yo);
                ++next;
            }
            t = t_new;
            y = y_new;
            k1 = k7;
            double fac = err == 0.0 ? 10.0 : 0.9 * std::pow(err, -0.2);
            fac = std::clamp(fac, 0.2, last_rejected ? 1.0 : 10.0);
            h = std::min(h * fac, h_max);
            last_rejected = false;
        } else {
            ++local.rejected;
            h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
            last_rejected = true;
        }
    }
    if (stats) *stats = local;
    return out;
}

struct SampledTrajectory {
    std::vector<double> times;
    std::vector<double> positions;
    std::vector<double> velocities;

    std::size_t size() const { return times.size(); }
};

/// n evenly spaced instants on [t0, t1], endpoints included.
inline std::vector<double> linspace(double t0, double t1, std::size_t n) {
    std::vector<double> t(n);
    if (n == 1) {
        t[0] = t0;
        return t;
    }
    for (std::size_t i = 0; i < n; ++i) t[i] = t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(n - 1);
    t.back() = t1;
    return t;
}

/// Samples x_sc'' = (g + z_ws'') / z0 * x_sc with z_ws = A sin(omega t + phase).
inline SampledTrajectory integrate(const ModelParams& params, const VerticalSinusoid& motion,
                                   const PendulumState& ic, double t0, double t1, std::size_t n_samples,
                                   const IntegratorConfig& cfg = {}, IntegrationStats* stats = nullptr) {
    params.validate();
    motion.validate();
    if (!std::isfinite(t0) || !std::isfinite(t1) || !(t1 > t0)) throw ConfigError("integrate: invalid time span");
    if (n_samples < 2) throw ConfigError("integrate: need at least two samples");
    SampledTrajectory traj;
    traj.times = linspace(t0, t1, n_samples);
    const double inv_z0 = 1.0 / params.z0;
    auto accel = [&](double t, double x, double) { return (params.g + surface_accel(motion, t)) * inv_z0 * x; };
    const auto states = integrate_second_order(accel, t0, {ic.x, ic.v}, traj.times, cfg, stats);
    traj.positions.reserve(n_samples);
    traj.velocities.reserve(n_samples);
    for (const auto& s : states) {
        traj.positions.push_back(s[0]);
        traj.velocities.push_back(s[1]);
    }
    return traj;
}

struct MonodromyConfig {
    IntegratorConfig integrator{1e-12, 1e-14, 0.0, 1e-14};
};

struct MonodromyResult {
    std::array<std::array<double, 2>, 2> matrix{};  ///< columns: solutions from (1,0) and (0,1)
    std::array<cplx, 2> multipliers{};
    CharacteristicExponent exponent;

    // Kahan's fma form of ad - bc; the plain difference loses everything
    // once the multiplier is large.
    double determinant() const {
        const double bc = matrix[0][1] * matrix[1][0];
        const double err = std::fma(-matrix[0][1], matrix[1][0], bc);
        return std::fma(matrix[0][0], matrix[1][1], -bc) + err;
    }
    double trace() const { return matrix[0][0] + matrix[1][1]; }
};

/// Floquet analysis of x'' + (c0 - 2 c1 cos 2 tau) x = 0 over one period tau in [0, pi].
inline MonodromyResult monodromy(const MathieuParams& p, const MonodromyConfig& cfg = {}) {
    if (!std::isfinite(p.c0) || !std::isfinite(p.c1)) throw ConfigError("monodromy: non-finite parameters");
    auto accel = [&](double tau, double x, double) { return -(p.c0 - 2.0 * p.c1 * std::cos(2.0 * tau)) * x; };
    const std::array<double, 1> end{std::numbers::pi};
    MonodromyResult r;
    const State2 col0 = integrate_second_order(accel, 0.0, {1.0, 0.0}, end, cfg.integrator).front();
    const State2 col1 = integrate_second_order(accel, 0.0, {0.0, 1.0}, end, cfg.integrator).front();
    r.matrix = {{{col0[0], col1[0]}, {col0[1], col1[1]}}};

    const double half_tr = 0.5 * r.trace();
    const cplx disc = std::sqrt(cplx(half_tr * half_tr - r.determinant(), 0.0));
    // Avoid cancellation: take the large root directly, the small one via the product.
    const cplx big = half_tr >= 0.0 ? half_tr + disc : half_tr - disc;
    r.multipliers = {big, r.determinant() / big};
    if (half_tr * half_tr < r.determinant()) {
        // Multipliers on the unit circle: the exponent is purely imaginary.
        r.exponent = {canonical_exponent(cplx(0.0, std::acos(half_tr / std::sqrt(r.determinant())) / std::numbers::pi))};
    } else {
        r.exponent = {canonical_exponent(std::log(big) / std::numbers::pi)};
    }
    return r;
}

inline CharacteristicExponent monodromy_exponent(const MathieuParams& p, const MonodromyConfig& cfg = {}) {
    return monodromy(p, cfg).exponent;
}

struct ErrorStats {
    std::vector<double> percent_errors;  ///< per sample
    double mean = 0.0;
    double max = 0.0;
    double sd = 0.0;
};

inline constexpr double kPercentErrorFloor = 1e-9;  // [m]

/// |x_hat - x| / max(|x|, 1e-9 m) * 100 at each sample of the reference.
inline double percent_error(double approx, double reference) {
    return std::abs(approx - reference) / std::max(std::abs(reference), kPercentErrorFloor) * 100.0;
}

inline ErrorStats compare(const AnalyticSolution& analytic, const SampledTrajectory& numeric) {
    ErrorStats out;
    out.percent_errors.reserve(numeric.size());
    for (std::size_t i = 0; i < numeric.size(); ++i)
        out.percent_errors.push_back(percent_error(analytic.evaluate(numeric.times[i]).x, numeric.positions[i]));
    const Summary s = summarize(out.percent_errors);
    out.mean = s.mean;
    out.max = s.max;
    out.sd = s.sd;
    return out;
}

}  // namespace drslip
