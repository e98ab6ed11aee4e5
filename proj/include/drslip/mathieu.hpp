#pragma once

// Approximate analytic solution of Mathieu's equation
//
//     x'' + (c0 - 2 c1 cos 2 tau) x = 0
//
// in Floquet form x(tau) = a1 e^{mu tau} sum C_2n e^{2 i n tau}
//                        + a2 e^{-mu tau} sum C_2n e^{-2 i n tau}.
//
// The characteristic exponent mu comes from the closed form
//     cosh(pi mu) = 1 - 2 Delta(0) sin^2(pi sqrt(c0) / 2)
// where Delta(0) is Hill's infinite tridiagonal determinant evaluated at
// mu = 0. The series coefficients follow from the three-term recurrence
//     beta_n C_2(n-1) + C_2n + beta_n C_2(n+1) = 0,
//     beta_n(mu) = c1 / ((2n - i mu)^2 - c0),
// solved outward from C_0 = 1 by continued fractions.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <vector>

#include "drslip/error.hpp"
#include "drslip/model.hpp"

namespace drslip {

using cplx = std::complex<double>;

inline constexpr double kDegenerateTol = 1e-14;

struct SeriesConfig {
    int terms = 10;            ///< N: harmonics kept on each side
    int depth = 0;             ///< continued-fraction depth D; 0 means terms + 20
    int hill_half_width = 25;  ///< M: Hill determinant truncation

    int effective_depth() const { return depth > 0 ? depth : terms + 20; }

    void validate() const {
        if (terms < 1) throw ConfigError("series: terms must be >= 1");
        if (effective_depth() < terms) throw ConfigError("series: depth must be >= terms");
        if (hill_half_width < 1) throw ConfigError("series: hill half-width must be >= 1");
    }
};

/// Representative of the exponent pair {+mu, -mu}, modulo 2i.
struct CharacteristicExponent {
    cplx mu;

    bool is_real(double tol = 1e-12) const { return std::abs(mu.imag()) <= tol * std::max(1.0, std::abs(mu)); }
};

/// Picks Re(mu) >= 0 (Im >= 0 when Re == 0) and wraps Im into (-1, 1].
/// e^{pi mu} is invariant under mu -> mu + 2i, so this is a true representative.
inline cplx canonical_exponent(cplx mu) {
    double im = std::remainder(mu.imag(), 2.0);  // [-1, 1]
    mu = {mu.real(), im};
    if (mu.real() < 0.0 || (mu.real() == 0.0 && mu.imag() < 0.0)) mu = -mu;
    im = mu.imag();
    if (im <= -1.0) im += 2.0;
    return {mu.real(), im};
}

inline void require_negative_c0(const MathieuParams& p) {
    if (!(p.c0 < 0.0) || !std::isfinite(p.c0)) throw ConfigError("mathieu: c0 must be negative and finite");
    if (!(p.c1 >= 0.0) || !std::isfinite(p.c1)) throw ConfigError("mathieu: c1 must be non-negative and finite");
    if (!(p.omega > 0.0)) throw ConfigError("mathieu: omega must be positive");
}

/// beta_n(mu) = c1 / ((2n - i mu)^2 - c0)
inline cplx beta(int n, cplx mu, const MathieuParams& p) {
    const cplx s = cplx(2.0 * n, 0.0) - cplx(0.0, 1.0) * mu;
    const cplx den = s * s - p.c0;
    if (std::abs(den) < kDegenerateTol) throw DegenerateParameterError("beta: resonant denominator");
    return p.c1 / den;
}

namespace detail {

inline double beta0(int n, const MathieuParams& p) {
    const double den = 4.0 * n * n - p.c0;
    if (std::abs(den) < kDegenerateTol) throw DegenerateParameterError("beta: resonant denominator");
    return p.c1 / den;
}

}  // namespace detail

/// Determinant of the (2M+1)-row truncation of Delta(0): unit diagonal,
/// beta_n(0) on both off-diagonals of row n. Computed by LU pivots of the
/// tridiagonal matrix.
inline double hill_determinant_at_zero(const MathieuParams& p, int half_width) {
    if (half_width < 1) throw ConfigError("hill determinant: half-width must be >= 1");
    double det = 1.0;
    double pivot = 1.0;
    double prev_beta = detail::beta0(-half_width, p);
    for (int n = -half_width + 1; n <= half_width; ++n) {
        const double b = detail::beta0(n, p);
        // Row n-1 carries prev_beta above the diagonal, row n carries b below it.
        pivot = 1.0 - prev_beta * b / pivot;
        if (std::abs(pivot) < kDegenerateTol) throw DegenerateParameterError("hill determinant: zero pivot");
        det *= pivot;
        prev_beta = b;
    }
    return det;
}

/// Multiplicative correction from the rows beyond |n| = M on both sides:
/// prod_{k >= M} (1 - beta_k beta_{k+1})^2, the leading-order factor each
/// appended pair of rows contributes. The first 256 factors are explicit, the
/// rest is the integral -c1^2 int_K^inf du / (4u^2 - c0)^2.
inline double hill_tail_factor(const MathieuParams& p, int half_width) {
    constexpr int kExplicit = 256;
    double log_sum = 0.0;
    const int k_end = half_width + kExplicit;
    for (int k = half_width; k < k_end; ++k)
        log_sum += std::log1p(-detail::beta0(k, p) * detail::beta0(k + 1, p));
    const double a = -p.c0;
    const double w = 2.0 * k_end;
    const double integral =
        std::atan(std::sqrt(a) / w) / (2.0 * a * std::sqrt(a)) - w / (2.0 * a * (w * w + a));
    log_sum -= 0.5 * p.c1 * p.c1 * integral;
    return std::exp(2.0 * log_sum);
}

/// Delta(0) with the truncation tail folded in; converges like M^-7 instead of M^-3.
inline double hill_determinant_limit(const MathieuParams& p, int half_width) {
    require_negative_c0(p);
    return hill_determinant_at_zero(p, half_width) * hill_tail_factor(p, half_width);
}

/// mu = acosh(1 - 2 Delta(0) sin^2(pi sqrt(c0) / 2)) / pi, evaluated in
/// complex arithmetic. For c0 < 0, sqrt(c0) is imaginary and
/// sin^2 = -sinh^2(pi sqrt|c0| / 2); large arguments switch to log form.
inline CharacteristicExponent characteristic_exponent(const MathieuParams& p, const SeriesConfig& cfg = {}) {
    require_negative_c0(p);
    cfg.validate();
    const double delta = hill_determinant_limit(p, cfg.hill_half_width);
    const double s = std::numbers::pi * std::sqrt(-p.c0) / 2.0;

    if (s > 20.0 && delta != 0.0) {
        // arg = 1 + 2 delta sinh^2 s ~ (delta/2) e^{2s}; acosh(y) = ln(2y) + O(y^-2).
        const double log_sinh = s + std::log1p(-std::exp(-2.0 * s)) - std::numbers::ln2;
        const double log_abs_arg = std::log(2.0 * std::abs(delta)) + 2.0 * log_sinh;
        const double re = (std::numbers::ln2 + log_abs_arg) / std::numbers::pi;
        // Negative delta puts the argument below -1: acosh(-y) = acosh(y) + i pi.
        const cplx mu = delta > 0.0 ? cplx(re, 0.0) : cplx(re, 1.0);
        return {canonical_exponent(mu)};
    }

    const cplx root_c0 = std::sqrt(cplx(p.c0, 0.0));
    const cplx sn = std::sin(std::numbers::pi * root_c0 / 2.0);
    const cplx arg = 1.0 - 2.0 * delta * sn * sn;
    const cplx mu = std::acosh(cplx(arg.real(), 0.0)) / std::numbers::pi;
    return {canonical_exponent(mu)};
}

/// Series coefficients C_2n for n in [-N, N], with polar form cached for n >= 0.
class CoefficientTable {
public:
    CoefficientTable() = default;
    CoefficientTable(int terms, std::vector<cplx> coeffs) : terms_(terms), coeffs_(std::move(coeffs)) {
        radius_.resize(terms_ + 1);
        angle_.resize(terms_ + 1);
        for (int n = 0; n <= terms_; ++n) {
            radius_[n] = std::abs(at(n));
            angle_[n] = std::arg(at(n));
        }
    }

    int terms() const { return terms_; }
    const cplx& at(int n) const { return coeffs_.at(static_cast<std::size_t>(n + terms_)); }
    double radius(int n) const { return radius_.at(static_cast<std::size_t>(n)); }
    double angle(int n) const { return angle_.at(static_cast<std::size_t>(n)); }
    const std::vector<cplx>& coefficients() const { return coeffs_; }

private:
    int terms_ = 0;
    std::vector<cplx> coeffs_;
    std::vector<double> radius_;
    std::vector<double> angle_;
};

/// Ratio C_{2sn} / C_{2s(n-1)} for direction s = +1 or -1, from the continued
/// fraction -beta / (1 - beta_n beta_{n+1} / (1 - ...)) truncated at depth D.
inline cplx continued_fraction_ratio(int n, int direction, cplx mu, const MathieuParams& p, int depth) {
    cplx den = 1.0;
    for (int k = depth - 1; k >= n; --k) {
        den = 1.0 - beta(direction * k, mu, p) * beta(direction * (k + 1), mu, p) / den;
        if (std::abs(den) < kDegenerateTol)
            throw DegenerateParameterError("continued fraction: vanishing denominator");
    }
    return -beta(direction * n, mu, p) / den;
}

/// C_0 = 1, C_2n from the continued fraction for n = 1..N, C_{-2n} = conj(C_2n).
inline CoefficientTable coefficient_table(const CharacteristicExponent& exponent, const MathieuParams& p, int terms,
                                          int depth) {
    if (terms < 1) throw ConfigError("coefficient table: N must be >= 1");
    if (depth < terms) throw ConfigError("coefficient table: depth must be >= N");
    std::vector<cplx> c(static_cast<std::size_t>(2 * terms + 1));
    c[terms] = 1.0;
    for (int n = 1; n <= terms; ++n) {
        c[terms + n] = continued_fraction_ratio(n, +1, exponent.mu, p, depth) * c[terms + n - 1];
        c[terms - n] = std::conj(c[terms + n]);
    }
    return {terms, std::move(c)};
}

/// Negative-index coefficients by running the inverted recurrence, without
/// assuming conjugate symmetry. Entry k holds C_{-2(k+1)}.
inline std::vector<cplx> negative_coefficients_by_recurrence(const CharacteristicExponent& exponent,
                                                             const MathieuParams& p, int terms, int depth) {
    std::vector<cplx> out(static_cast<std::size_t>(terms));
    cplx prev = 1.0;
    for (int n = 1; n <= terms; ++n) {
        prev = continued_fraction_ratio(n, -1, exponent.mu, p, depth) * prev;
        out[n - 1] = prev;
    }
    return out;
}

struct SolutionCoefficients {
    double alpha1 = 0.0;
    double alpha2 = 0.0;
};

/// Position and first two t-derivatives of a real trajectory.
struct Kinematics {
    double x = 0.0;
    double v = 0.0;
    double a = 0.0;
};

/// Values of the two real basis functions y1 = e^{mu tau} P(tau) and
/// y2 = e^{-mu tau} P(-tau) and their t-derivatives.
struct BasisValues {
    Kinematics y1;
    Kinematics y2;
};

/// Everything about the series that does not depend on initial conditions.
class MathieuBasis {
public:
    MathieuBasis() = default;

    MathieuBasis(const MathieuParams& params, const SeriesConfig& cfg = {})
        : params_(params), exponent_(characteristic_exponent(params, cfg)) {
        if (!exponent_.is_real())
            throw NonRealExponentError("mathieu basis: the real-form series needs a real characteristic exponent");
        mu_ = exponent_.mu.real();
        table_ = coefficient_table(exponent_, params, cfg.terms, cfg.effective_depth());
        split_coefficients();
    }

    MathieuBasis(const MathieuParams& params, const CharacteristicExponent& exponent, CoefficientTable table)
        : params_(params), exponent_(exponent), table_(std::move(table)) {
        if (!exponent_.is_real())
            throw NonRealExponentError("mathieu basis: the real-form series needs a real characteristic exponent");
        mu_ = exponent_.mu.real();
        split_coefficients();
    }

    const MathieuParams& params() const { return params_; }
    const CharacteristicExponent& exponent() const { return exponent_; }
    const CoefficientTable& table() const { return table_; }

    BasisValues evaluate(double t) const {
        const double tau = tau_of_t(params_.omega, t);
        // P(tau) = r0 + sum 2 Re(C_2n e^{2 i n tau}), Q(tau) = P(-tau), in real arithmetic.
        const double c1 = std::cos(2.0 * tau), s1 = std::sin(2.0 * tau);
        double p = re_[0], dp = 0.0, ddp = 0.0;
        double q = p, dq = 0.0, ddq = 0.0;
        double cn = 1.0, sn = 0.0;
        for (std::size_t n = 1; n < re_.size(); ++n) {
            const double c = cn * c1 - sn * s1;
            sn = sn * c1 + cn * s1;
            cn = c;
            const double ac = re_[n] * cn, bs = im_[n] * sn, as = re_[n] * sn, bc = im_[n] * cn;
            const double wr = ac - bs, wi = as + bc;  // C e^{+i n phi}
            const double ur = ac + bs, ui = bc - as;  // C e^{-i n phi}
            const double k = 2.0 * static_cast<double>(n);
            p += 2.0 * wr;
            dp -= 2.0 * k * wi;
            ddp -= 2.0 * k * k * wr;
            q += 2.0 * ur;
            dq += 2.0 * k * ui;
            ddq -= 2.0 * k * k * ur;
        }
        const double mu = mu_;
        const double e1 = std::exp(mu * tau);
        const double e2 = 1.0 / e1;
        const double h = 0.5 * params_.omega;  // dtau/dt
        BasisValues out;
        out.y1 = {e1 * p, h * e1 * (mu * p + dp), h * h * e1 * (mu * mu * p + 2.0 * mu * dp + ddp)};
        out.y2 = {e2 * q, h * e2 * (-mu * q + dq), h * h * e2 * (mu * mu * q - 2.0 * mu * dq + ddq)};
        return out;
    }

    /// Positions of y1 and y2 on the uniform grid t_i = t0 + i dt.
    ///
    /// e^{+-mu tau} and e^{i phi} follow multiplicative recurrences, re-anchored
    /// every 32 samples. The Fourier parts are Clenshaw sums, run over small
    /// blocks of samples at once so the recurrences interleave.
    void evaluate_grid(double t0, double dt, std::span<double> y1, std::span<double> y2) const {
        if (y1.size() != y2.size()) throw ConfigError("evaluate_grid: output spans differ in length");
        const std::size_t n = y1.size();
        const double omega = params_.omega;
        const double dphi = omega * dt;  // phi = 2 tau
        const double rot_c = std::cos(dphi), rot_s = std::sin(dphi);
        const double growth = std::exp(0.5 * mu_ * dphi);
        const std::size_t top = re_.size() - 1;
        const double r0 = re_[0];

        constexpr std::size_t kBlock = 8;
        double c = 0.0, sn = 0.0, e = 0.0;
        for (std::size_t i0 = 0; i0 < n; i0 += kBlock) {
            const std::size_t m = std::min(kBlock, n - i0);
            double x2[kBlock] = {}, sphi[kBlock] = {}, e1[kBlock] = {};
            for (std::size_t j = 0; j < m; ++j) {
                const std::size_t i = i0 + j;
                if (i % 32 == 0) {
                    const double tau = tau_of_t(omega, t0 + static_cast<double>(i) * dt);
                    c = std::cos(2.0 * tau);
                    sn = std::sin(2.0 * tau);
                    e = std::exp(mu_ * tau);
                } else {
                    const double next = c * rot_c - sn * rot_s;
                    sn = sn * rot_c + c * rot_s;
                    c = next;
                    e *= growth;
                }
                x2[j] = 2.0 * c;
                sphi[j] = sn;
                e1[j] = e;
            }
            double ca[kBlock] = {}, cb[kBlock] = {}, sa[kBlock] = {}, sb[kBlock] = {};
            for (std::size_t k = top; k >= 1; --k) {
                const double a = re_[k], b = im_[k];
                for (std::size_t j = 0; j < kBlock; ++j) {
                    const double tc = a + x2[j] * ca[j] - cb[j];
                    cb[j] = ca[j];
                    ca[j] = tc;
                    const double ts = b + x2[j] * sa[j] - sb[j];
                    sb[j] = sa[j];
                    sa[j] = ts;
                }
            }
            for (std::size_t j = 0; j < m; ++j) {
                const double cos_sum = 0.5 * x2[j] * ca[j] - cb[j];  // sum a_n cos(n phi)
                const double sin_sum = sphi[j] * sa[j];              // sum b_n sin(n phi)
                y1[i0 + j] = e1[j] * (r0 + 2.0 * (cos_sum - sin_sum));
                y2[i0 + j] = (r0 + 2.0 * (cos_sum + sin_sum)) / e1[j];
            }
        }
    }

    /// alpha1, alpha2 matching x(t0) = x0 and x'(t0) = v0.
    SolutionCoefficients fit(double x0, double v0, double t0 = 0.0) const {
        const BasisValues b = evaluate(t0);
        const double a11 = b.y1.x, a12 = b.y2.x, a21 = b.y1.v, a22 = b.y2.v;
        const double det = a11 * a22 - a12 * a21;
        // Sine of the angle between the two columns: y1 and y2 can differ in
        // scale by e^{2 mu tau}, so compare det against each column's own norm.
        const double scale = std::hypot(a11, a21) * std::hypot(a12, a22);
        if (!(std::abs(det) >= 1e-12 * scale)) throw SingularBasisError("fit: basis Wronskian vanishes");
        return {(x0 * a22 - a12 * v0) / det, (a11 * v0 - a21 * x0) / det};
    }

private:
    void split_coefficients() {
        re_.resize(static_cast<std::size_t>(table_.terms()) + 1);
        im_.resize(re_.size());
        for (int n = 0; n <= table_.terms(); ++n) {
            re_[n] = table_.at(n).real();
            im_[n] = table_.at(n).imag();
        }
    }

    MathieuParams params_;
    CharacteristicExponent exponent_;
    CoefficientTable table_;
    double mu_ = 0.0;
    std::vector<double> re_{1.0}, im_{0.0};
};

inline SolutionCoefficients fit_initial_conditions(const MathieuBasis& basis, double x0, double v0, double t0 = 0.0) {
    return basis.fit(x0, v0, t0);
}

/// A fitted trajectory of the DRS-LIP horizontal dynamics.
class AnalyticSolution {
public:
    AnalyticSolution() = default;
    AnalyticSolution(MathieuBasis basis, SolutionCoefficients coeffs) : basis_(std::move(basis)), coeffs_(coeffs) {}

    static AnalyticSolution from_initial_state(MathieuBasis basis, const PendulumState& ic, double t0 = 0.0) {
        const SolutionCoefficients c = basis.fit(ic.x, ic.v, t0);
        return {std::move(basis), c};
    }

    const MathieuBasis& basis() const { return basis_; }
    const MathieuParams& mathieu() const { return basis_.params(); }
    const CharacteristicExponent& exponent() const { return basis_.exponent(); }
    const CoefficientTable& table() const { return basis_.table(); }
    const SolutionCoefficients& coefficients() const { return coeffs_; }

    Kinematics kinematics(double t) const {
        if (coeffs_.alpha1 == 0.0 && coeffs_.alpha2 == 0.0) return {};
        const BasisValues b = basis_.evaluate(t);
        const double a1 = coeffs_.alpha1, a2 = coeffs_.alpha2;
        return {a1 * b.y1.x + a2 * b.y2.x, a1 * b.y1.v + a2 * b.y2.v, a1 * b.y1.a + a2 * b.y2.a};
    }

    PendulumState evaluate(double t) const {
        const Kinematics k = kinematics(t);
        return {k.x, k.v};
    }

    double second_derivative(double t) const { return kinematics(t).a; }

    /// x(t0 + i dt) for i = 0 .. out.size() - 1.
    void positions_on_grid(double t0, double dt, std::span<double> out) const {
        std::vector<double> y2(out.size());
        basis_.evaluate_grid(t0, dt, out, y2);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = coeffs_.alpha1 * out[i] + coeffs_.alpha2 * y2[i];
    }

private:
    MathieuBasis basis_;
    SolutionCoefficients coeffs_;
};

inline PendulumState evaluate(const AnalyticSolution& s, double t) { return s.evaluate(t); }
inline double evaluate_second_derivative(const AnalyticSolution& s, double t) { return s.second_derivative(t); }

/// Convenience: full pipeline from physical parameters and an initial state.
inline AnalyticSolution solve_analytic(const ModelParams& model, const VerticalSinusoid& motion,
                                       const PendulumState& ic, const SeriesConfig& cfg = {}) {
    return AnalyticSolution::from_initial_state(MathieuBasis(to_mathieu(model, motion), cfg), ic);
}

}  // namespace drslip
