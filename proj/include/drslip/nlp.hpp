#pragma once

// Small dense nonlinear programs
//
//     min f(x)  s.t.  h(x) = 0,  g(x) <= 0,  lower <= x <= upper
//
// and a built-in augmented-Lagrangian (Powell-Hestenes-Rockafellar) solver.
// Inner unconstrained problems are solved by BFGS; merit gradients are built
// from a central-difference Jacobian of the constraints. Box bounds are
// treated as ordinary inequalities. Everything is sequential, so the same
// problem always yields the same bits.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "drslip/error.hpp"

namespace drslip {

struct NlpProblem {
    int n = 0;     ///< decision dimension
    int n_eq = 0;  ///< equality constraints h
    int n_in = 0;  ///< general inequality constraints g (bounds excluded)
    std::vector<double> lower, upper;

    std::function<double(std::span<const double>)> cost;  ///< empty: f = 0
    /// Fills h (size n_eq) and g (size n_in) at x.
    std::function<void(std::span<const double>, std::span<double>, std::span<double>)> constraints;

    /// Inequalities including the two-sided box bounds.
    int inequality_count() const { return n_in + 2 * n; }

    void validate() const {
        if (n <= 0) throw ConfigError("nlp: dimension must be positive");
        if (n_eq < 0 || n_in < 0) throw ConfigError("nlp: negative constraint count");
        if (static_cast<int>(lower.size()) != n || static_cast<int>(upper.size()) != n)
            throw ConfigError("nlp: bounds must match the dimension");
        for (int i = 0; i < n; ++i)
            if (!(lower[i] <= upper[i])) throw ConfigError("nlp: lower bound exceeds upper bound");
        if ((n_eq > 0 || n_in > 0) && !constraints) throw ConfigError("nlp: constraint callback missing");
    }
};

struct NlpOptions {
    double tol = 1e-6;  ///< constraint violation and stationarity
    int max_outer = 40;
    int max_inner = 2000;
    double initial_penalty = 1.0;
    double penalty_growth = 10.0;
    double max_penalty = 1e12;
    double fd_step = 1e-7;  ///< relative central-difference step

    void validate() const {
        if (!(tol > 0.0)) throw ConfigError("nlp: tol must be > 0");
        if (max_outer < 1 || max_inner < 1) throw ConfigError("nlp: iteration limits must be >= 1");
        if (!(initial_penalty > 0.0) || !(penalty_growth > 1.0)) throw ConfigError("nlp: bad penalty schedule");
        if (!(fd_step > 0.0)) throw ConfigError("nlp: fd_step must be > 0");
    }
};

struct NlpResult {
    std::vector<double> x;
    std::vector<double> eq_multipliers;
    std::vector<double> in_multipliers;  ///< general inequalities, then lower, then upper bounds
    double cost = 0.0;
    double violation = 0.0;     ///< max |h|, max(g, 0)
    double stationarity = 0.0;  ///< inf-norm of the Lagrangian gradient
    int outer_iterations = 0;
    int inner_iterations = 0;
    long evaluations = 0;
    double penalty = 0.0;
    bool converged = false;
    std::string message;
    double wall_ms = 0.0;
};

/// Raised when the solver stops short of the tolerances; carries the best iterate.
class NlpNotConvergedError : public InfeasiblePlanError {
public:
    NlpNotConvergedError(const std::string& what, NlpResult best)
        : InfeasiblePlanError(what), result_(std::move(best)) {}
    const NlpResult& result() const { return result_; }

private:
    NlpResult result_;
};

/// Pluggable solver engine.
class NlpSolver {
public:
    virtual ~NlpSolver() = default;
    virtual NlpResult solve(const NlpProblem& problem, std::span<const double> x0) const = 0;
};

namespace detail {

/// Evaluates h and the full inequality vector (general, lower, upper).
struct ConstraintEval {
    const NlpProblem& p;
    std::vector<double> h, g;
    long* counter;

    ConstraintEval(const NlpProblem& problem, long* count)
        : p(problem), h(problem.n_eq), g(problem.inequality_count()), counter(count) {}

    void operator()(std::span<const double> x) {
        ++*counter;
        if (p.n_eq > 0 || p.n_in > 0) p.constraints(x, h, std::span<double>(g.data(), p.n_in));
        for (int i = 0; i < p.n; ++i) {
            g[p.n_in + i] = p.lower[i] - x[i];
            g[p.n_in + p.n + i] = x[i] - p.upper[i];
        }
    }

    double violation() const {
        double v = 0.0;
        for (double e : h) v = std::max(v, std::abs(e));
        for (double e : g) v = std::max(v, e);
        return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    }
};

inline double inf_norm(std::span<const double> v) {
    double m = 0.0;
    for (double e : v) m = std::max(m, std::abs(e));
    return m;
}

}  // namespace detail

class AugmentedLagrangianSolver final : public NlpSolver {
public:
    explicit AugmentedLagrangianSolver(NlpOptions options = {}) : opt_(options) { opt_.validate(); }

    const NlpOptions& options() const { return opt_; }

    NlpResult solve(const NlpProblem& problem, std::span<const double> x0) const override {
        const auto clock_start = std::chrono::steady_clock::now();
        problem.validate();
        if (static_cast<int>(x0.size()) != problem.n) throw ConfigError("nlp: initial guess has wrong dimension");
        const int n = problem.n;
        NlpResult r;
        r.x.assign(x0.begin(), x0.end());
        r.eq_multipliers.assign(problem.n_eq, 0.0);
        r.in_multipliers.assign(problem.inequality_count(), 0.0);
        detail::ConstraintEval ce(problem, &r.evaluations);

        auto cost = [&](std::span<const double> x) { return problem.cost ? problem.cost(x) : 0.0; };
        double rho = opt_.initial_penalty;
        auto& lam = r.eq_multipliers;
        auto& nu = r.in_multipliers;

        // Augmented Lagrangian at x for the current multipliers and penalty.
        auto merit = [&](std::span<const double> x) {
            ce(x);
            double m = cost(x);
            for (int i = 0; i < problem.n_eq; ++i) m += lam[i] * ce.h[i] + 0.5 * rho * ce.h[i] * ce.h[i];
            for (std::size_t j = 0; j < ce.g.size(); ++j) {
                const double s = std::max(0.0, nu[j] + rho * ce.g[j]);
                m += (s * s - nu[j] * nu[j]) / (2.0 * rho);
            }
            return std::isfinite(m) ? m : std::numeric_limits<double>::infinity();
        };
        // Central differences of the cost alone.
        auto cost_gradient = [&](std::vector<double>& x, std::vector<double>& grad) {
            std::fill(grad.begin(), grad.end(), 0.0);
            if (!problem.cost) return;
            for (int i = 0; i < n; ++i) {
                const double xi = x[i];
                const double step = opt_.fd_step * std::max(1.0, std::abs(xi));
                x[i] = xi + step;
                const double fp = cost(x);
                x[i] = xi - step;
                const double fm = cost(x);
                x[i] = xi;
                grad[i] = (fp - fm) / (2.0 * step);
            }
        };
        // Gradient of the merit from a central-difference Jacobian of the
        // (smooth) constraints. Differencing the merit itself would straddle
        // the curvature jumps of max(0, .)^2 near the solution.
        const int m_eq = problem.n_eq, m_in = problem.n_in;
        std::vector<double> jac_h(static_cast<std::size_t>(m_eq) * n), jac_g(static_cast<std::size_t>(m_in) * n);
        std::vector<double> hp(m_eq), gp(m_in);
        auto merit_gradient = [&](std::vector<double>& x, std::vector<double>& grad) {
            for (int i = 0; i < n; ++i) {
                const double xi = x[i];
                const double step = opt_.fd_step * std::max(1.0, std::abs(xi));
                x[i] = xi + step;
                ce(x);
                std::copy(ce.h.begin(), ce.h.end(), hp.begin());
                std::copy(ce.g.begin(), ce.g.begin() + m_in, gp.begin());
                x[i] = xi - step;
                ce(x);
                x[i] = xi;
                for (int r = 0; r < m_eq; ++r) jac_h[r * n + i] = (hp[r] - ce.h[r]) / (2.0 * step);
                for (int r = 0; r < m_in; ++r) jac_g[r * n + i] = (gp[r] - ce.g[r]) / (2.0 * step);
            }
            cost_gradient(x, grad);
            ce(x);
            for (int r = 0; r < m_eq; ++r) {
                const double w = lam[r] + rho * ce.h[r];
                if (w != 0.0)
                    for (int i = 0; i < n; ++i) grad[i] += w * jac_h[r * n + i];
            }
            for (int r = 0; r < m_in; ++r) {
                const double w = std::max(0.0, nu[r] + rho * ce.g[r]);
                if (w != 0.0)
                    for (int i = 0; i < n; ++i) grad[i] += w * jac_g[r * n + i];
            }
            for (int i = 0; i < n; ++i) {
                grad[i] -= std::max(0.0, nu[m_in + i] + rho * ce.g[m_in + i]);          // lower - x <= 0
                grad[i] += std::max(0.0, nu[m_in + n + i] + rho * ce.g[m_in + n + i]);  // x - upper <= 0
            }
        };

        // Already optimal: feasible and stationary with zero multipliers.
        std::vector<double> grad(n);
        ce(r.x);
        r.violation = ce.violation();
        if (r.violation <= opt_.tol) {
            cost_gradient(r.x, grad);
            if (detail::inf_norm(grad) <= opt_.tol) {
                r.stationarity = detail::inf_norm(grad);
                r.cost = cost(r.x);
                r.converged = true;
                r.message = "initial point satisfies the tolerances";
                r.penalty = rho;
                r.wall_ms = elapsed_ms(clock_start);
                return r;
            }
        }

        double prev_violation = r.violation;
        const double inner_tol = 0.1 * opt_.tol;
        for (int outer = 1; outer <= opt_.max_outer; ++outer) {
            r.outer_iterations = outer;
            r.stationarity = bfgs(merit, merit_gradient, r.x, inner_tol, r.inner_iterations);
            ce(r.x);
            r.violation = ce.violation();
            for (int i = 0; i < problem.n_eq; ++i) lam[i] += rho * ce.h[i];
            for (std::size_t j = 0; j < ce.g.size(); ++j) nu[j] = std::max(0.0, nu[j] + rho * ce.g[j]);
            r.penalty = rho;
            if (r.violation <= opt_.tol && r.stationarity <= opt_.tol) {
                r.converged = true;
                r.message = "converged";
                break;
            }
            if (r.violation > 0.25 * prev_violation) rho = std::min(rho * opt_.penalty_growth, opt_.max_penalty);
            if (rho >= opt_.max_penalty && r.violation > opt_.tol && r.violation > 0.9 * prev_violation) {
                r.message = "constraint violation stagnates; problem appears infeasible";
                break;
            }
            prev_violation = std::min(prev_violation, r.violation);
        }
        r.cost = cost(r.x);
        if (!r.converged && r.message.empty()) r.message = "outer iteration limit reached";
        r.wall_ms = elapsed_ms(clock_start);
        return r;
    }

private:
    static double elapsed_ms(std::chrono::steady_clock::time_point start) {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    }

    /// Minimizes fn from x in place; returns the final gradient inf-norm.
    template <class Fn, class Grad>
    double bfgs(Fn& fn, Grad& gradient, std::vector<double>& x, double gtol, int& iterations) const {
        const int n = static_cast<int>(x.size());
        std::vector<double> g(n), g_new(n), d(n), s(n), y(n), x_new(n), hy(n);
        std::vector<double> H(static_cast<std::size_t>(n) * n, 0.0);
        auto reset = [&](double scale) {
            std::fill(H.begin(), H.end(), 0.0);
            for (int i = 0; i < n; ++i) H[i * n + i] = scale;
        };
        reset(1.0);
        double f = fn(x);
        gradient(x, g);
        bool scaled = false;
        for (int it = 0; it < opt_.max_inner; ++it) {
            if (detail::inf_norm(g) <= gtol) break;
            ++iterations;
            for (int i = 0; i < n; ++i) {
                double acc = 0.0;
                for (int j = 0; j < n; ++j) acc -= H[i * n + j] * g[j];
                d[i] = acc;
            }
            double slope = 0.0;
            for (int i = 0; i < n; ++i) slope += g[i] * d[i];
            if (!(slope < 0.0)) {
                reset(1.0);
                scaled = false;
                for (int i = 0; i < n; ++i) d[i] = -g[i];
                slope = 0.0;
                for (int i = 0; i < n; ++i) slope -= g[i] * g[i];
            }
            // Backtracking Armijo line search.
            double step = 1.0, f_new = f;
            bool accepted = false;
            for (int ls = 0; ls < 60; ++ls) {
                for (int i = 0; i < n; ++i) x_new[i] = x[i] + step * d[i];
                f_new = fn(x_new);
                if (f_new <= f + 1e-4 * step * slope) {
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if (!accepted) {
                if (scaled) {  // retry once along steepest descent
                    reset(1.0);
                    scaled = false;
                    continue;
                }
                break;
            }
            gradient(x_new, g_new);
            double sy = 0.0, yy = 0.0;
            for (int i = 0; i < n; ++i) {
                s[i] = x_new[i] - x[i];
                y[i] = g_new[i] - g[i];
                sy += s[i] * y[i];
                yy += y[i] * y[i];
            }
            x.swap(x_new);
            g.swap(g_new);
            f = f_new;
            if (sy <= 1e-14 * std::sqrt(yy) * detail::inf_norm(s) || !(yy > 0.0)) continue;
            if (!scaled) {
                reset(sy / yy);
                scaled = true;
            }
            // H <- (I - rho s y^T) H (I - rho y s^T) + rho s s^T
            const double rr = 1.0 / sy;
            double yhy = 0.0;
            for (int i = 0; i < n; ++i) {
                double acc = 0.0;
                for (int j = 0; j < n; ++j) acc += H[i * n + j] * y[j];
                hy[i] = acc;
                yhy += y[i] * acc;
            }
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    H[i * n + j] += (1.0 + rr * yhy) * rr * s[i] * s[j] - rr * (hy[i] * s[j] + s[i] * hy[j]);
        }
        return detail::inf_norm(g);
    }

    NlpOptions opt_;
};

/// Runs the solver and throws NlpNotConvergedError when it stops short.
inline NlpResult solve_nlp(const NlpProblem& problem, std::span<const double> x0, const NlpSolver& solver) {
    NlpResult r = solver.solve(problem, x0);
    if (!r.converged) throw NlpNotConvergedError("nlp: " + r.message, r);
    return r;
}

inline NlpResult solve_nlp(const NlpProblem& problem, std::span<const double> x0, const NlpOptions& options = {}) {
    return solve_nlp(problem, x0, AugmentedLagrangianSolver(options));
}

}  // namespace drslip
