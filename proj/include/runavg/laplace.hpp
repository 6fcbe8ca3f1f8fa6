#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "runavg/convergence.hpp"
#include "runavg/errors.hpp"
#include "runavg/signals.hpp"

namespace runavg {

/// One partial-fraction term c / (s - j*beta)^r of a rational transform with
/// all poles on the imaginary axis.
struct TransformTerm {
    complexd c;
    double beta = 0.0;
    int r = 1;
};

/// F(s) = sum of terms, plus the spec it was derived from. Conjugate-pair
/// structure makes F real on the positive real axis.
struct TransformModel {
    std::vector<TransformTerm> terms;
    SignalSpec origin = Constant{0.0};
};

/// Exact transform of a signal spec as a sum of simple poles on j*R:
///   t^p e^{j b t}  <->  p! / (s - j b)^{p+1}
/// applied termwise to each supported family.
inline TransformModel closed_form_transform(const SignalSpec& spec) {
    validate(spec);
    TransformModel model;
    model.origin = spec;
    struct Visitor {
        std::vector<TransformTerm>& terms;
        void operator()(const MonomialOsc& s) const {
            const double fact = factorial(s.p);
            if (s.phase == Phase::sin) {
                const complexd c = s.scale * fact / complexd(0.0, 2.0);
                terms.push_back({c, s.omega, s.p + 1});
                terms.push_back({-c, -s.omega, s.p + 1});
            } else {
                const complexd c = s.scale * fact / 2.0;
                terms.push_back({c, s.omega, s.p + 1});
                terms.push_back({c, -s.omega, s.p + 1});
            }
        }
        void operator()(const FourierPoly& s) const {
            const double fact = factorial(s.p);
            for (const auto& [k, c] : s.coefficients)
                if (std::abs(c) > 0.0) terms.push_back({c * fact, k * s.omega, s.p + 1});
        }
        void operator()(const AlmostPeriodicPoly& s) const {
            const double fact = factorial(s.p);
            for (const auto& [lambda, c] : s.terms)
                if (std::abs(c) > 0.0) terms.push_back({c * fact, lambda, s.p + 1});
        }
        void operator()(const Constant& s) const { terms.push_back({s.value, 0.0, 1}); }
        void operator()(const Monomial& s) const { terms.push_back({s.scale * factorial(s.p), 0.0, s.p + 1}); }
    };
    std::visit(Visitor{model.terms}, spec);
    return model;
}

inline complexd evaluate(const TransformModel& model, complexd s) {
    complexd sum{0.0, 0.0};
    for (const auto& term : model.terms)
        sum += term.c / ipow(s - complexd(0.0, term.beta), term.r);
    return sum;
}

/// F at real s > 0; the conjugate-pair structure keeps the imaginary part at
/// rounding level, which is checked and stripped.
inline double evaluate_real(const TransformModel& model, double s) {
    if (!(s > 0.0) || !std::isfinite(s)) throw domain_error("evaluate_real: s must be finite and > 0");
    const complexd v = evaluate(model, complexd(s, 0.0));
    if (std::abs(v.imag()) > 1e-9 * (1.0 + std::abs(v.real())))
        throw accuracy_error("evaluate_real: transform is not real at s = " + std::to_string(s) +
                             " (imag " + std::to_string(v.imag()) + "); conjugate-pair structure violated");
    return v.real();
}

/// Geometric sequence of evaluation points s_k = s0 * rho^k approaching 0,
/// with the polynomial degree used for the limit fit.
struct LimitLadder {
    double s0 = 1e-1;
    double rho = 0.31622776601683794; // 10^(-1/2)
    int count = 9;                    // down to s = 1e-5
    int degree = 1;                   // fit L + a*s (+ b*s^2 when 2)

    [[nodiscard]] std::vector<double> values() const {
        if (!(s0 > 0.0) || !(rho > 0.0) || !(rho < 1.0))
            throw config_error("LimitLadder: need s0 > 0 and 0 < rho < 1");
        if (count < 4) throw config_error("LimitLadder: need at least 4 points");
        if (degree != 1 && degree != 2) throw config_error("LimitLadder: degree must be 1 or 2");
        std::vector<double> s(static_cast<std::size_t>(count));
        for (int k = 0; k < count; ++k) s[static_cast<std::size_t>(k)] = s0 * ipow(rho, k);
        return s;
    }
};

namespace detail {

/// Least-squares polynomial fit y ~ sum coef[i] x^i via normal equations
/// (degree <= 2, so conditioning is not a concern on our windows).
inline std::vector<double> polyfit(const std::vector<double>& x, const std::vector<double>& y, int degree) {
    const int m = degree + 1;
    std::vector<double> A(static_cast<std::size_t>(m * m), 0.0), b(static_cast<std::size_t>(m), 0.0);
    for (std::size_t k = 0; k < x.size(); ++k) {
        std::vector<double> powers(static_cast<std::size_t>(2 * m - 1), 1.0);
        for (std::size_t i = 1; i < powers.size(); ++i) powers[i] = powers[i - 1] * x[k];
        for (int i = 0; i < m; ++i) {
            b[static_cast<std::size_t>(i)] += powers[static_cast<std::size_t>(i)] * y[k];
            for (int j = 0; j < m; ++j)
                A[static_cast<std::size_t>(i * m + j)] += powers[static_cast<std::size_t>(i + j)];
        }
    }
    // Gaussian elimination with partial pivoting on the m x m system.
    std::vector<double> coef(b);
    std::vector<double> M(A);
    for (int col = 0; col < m; ++col) {
        int piv = col;
        for (int row = col + 1; row < m; ++row)
            if (std::abs(M[static_cast<std::size_t>(row * m + col)]) >
                std::abs(M[static_cast<std::size_t>(piv * m + col)]))
                piv = row;
        for (int j = 0; j < m; ++j)
            std::swap(M[static_cast<std::size_t>(col * m + j)], M[static_cast<std::size_t>(piv * m + j)]);
        std::swap(coef[static_cast<std::size_t>(col)], coef[static_cast<std::size_t>(piv)]);
        const double d = M[static_cast<std::size_t>(col * m + col)];
        if (d == 0.0) throw accuracy_error("polyfit: singular normal equations");
        for (int row = col + 1; row < m; ++row) {
            const double f = M[static_cast<std::size_t>(row * m + col)] / d;
            for (int j = col; j < m; ++j)
                M[static_cast<std::size_t>(row * m + j)] -= f * M[static_cast<std::size_t>(col * m + j)];
            coef[static_cast<std::size_t>(row)] -= f * coef[static_cast<std::size_t>(col)];
        }
    }
    for (int row = m - 1; row >= 0; --row) {
        double v = coef[static_cast<std::size_t>(row)];
        for (int j = row + 1; j < m; ++j)
            v -= M[static_cast<std::size_t>(row * m + j)] * coef[static_cast<std::size_t>(j)];
        coef[static_cast<std::size_t>(row)] = v / M[static_cast<std::size_t>(row * m + row)];
    }
    return coef;
}

/// Extrapolate g(s) -> L as s -> 0 from samples on a decreasing ladder.
/// Divergence is recognised first from the log-log slope; otherwise L comes
/// from a polynomial fit over the smallest-|s| window, with a one-point window
/// extension as the stability check.
inline LimitEstimate extrapolate_to_zero(const std::vector<double>& svals, const std::vector<double>& gvals,
                                         int degree, double growth_tol) {
    LimitEstimate est;
    est.horizon = svals.back();

    double gmax = 0.0;
    for (double g : gvals) gmax = std::max(gmax, std::abs(g));
    if (gmax < 1e-300) {
        est.verdict = Verdict::Converged;
        return est;
    }

    std::vector<double> lx, ly;
    for (std::size_t k = 0; k < svals.size(); ++k) {
        lx.push_back(std::log(svals[k]));
        ly.push_back(std::log(std::max(std::abs(gvals[k]), 1e-300)));
    }
    const double slope = ls_slope(lx, ly);
    if (slope < -growth_tol && std::abs(gvals.back()) > 2.0 * std::abs(gvals.front())) {
        est.verdict = Verdict::Diverging;
        est.growth_exponent = -slope; // g ~ c / s^exponent
        est.value = gvals.back();
        return est;
    }

    const auto window = static_cast<std::size_t>(degree + 3);
    if (svals.size() < window + 1)
        throw config_error("extrapolate_to_zero: ladder too short for degree " + std::to_string(degree));
    double residual_rms = 0.0;
    double g_scale = 0.0;
    const auto fit_tail = [&](std::size_t w) {
        std::vector<double> xs(svals.end() - static_cast<std::ptrdiff_t>(w), svals.end());
        std::vector<double> ys(gvals.end() - static_cast<std::ptrdiff_t>(w), gvals.end());
        // Normalize the abscissa to [rho^w, 1]; the constant term is scale
        // invariant and the normal equations stay well conditioned.
        const double scale = xs.front();
        for (double& x : xs) x /= scale;
        const std::vector<double> coef = polyfit(xs, ys, degree);
        residual_rms = 0.0;
        g_scale = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            double fit = 0.0;
            for (int d = degree; d >= 0; --d) fit = fit * xs[i] + coef[static_cast<std::size_t>(d)];
            residual_rms += (ys[i] - fit) * (ys[i] - fit);
            g_scale = std::max(g_scale, std::abs(ys[i]));
        }
        residual_rms = std::sqrt(residual_rms / static_cast<double>(xs.size()));
        return coef[0];
    };
    const double L_wider = fit_tail(window + 1);
    const double L = fit_tail(window); // leaves residual_rms/g_scale at the final window
    est.value = L;
    est.oscillation = std::abs(L - L_wider);
    const bool stable = est.oscillation <= std::max(1e-7, 1e-5 * std::abs(L));
    const bool residual_ok = residual_rms <= std::max(1e-8, 1e-5 * (1.0 + g_scale));
    est.verdict = stable && residual_ok ? Verdict::Converged : Verdict::Oscillating;
    return est;
}

} // namespace detail

/// lim_{s->0} s F(s), via evaluation of g(s) = s F(s) on the ladder and
/// polynomial extrapolation to s = 0. Growth toward s = 0 (a pole of g at the
/// origin) is classified Diverging with the fitted power of 1/s.
inline LimitEstimate sf_limit(const TransformModel& model, const LimitLadder& ladder) {
    const std::vector<double> svals = ladder.values();
    std::vector<double> gvals(svals.size());
    for (std::size_t k = 0; k < svals.size(); ++k) gvals[k] = svals[k] * evaluate_real(model, svals[k]);
    constexpr double kGrowthSlopeTol = 0.1;
    return detail::extrapolate_to_zero(svals, gvals, ladder.degree, kGrowthSlopeTol);
}

/// Order of vanishing of s F(s) at s = 0: the k with s F(s) ~ c s^k.
/// Computed from the exact Taylor coefficients of F at 0,
///   F^(n)(0)/n! = sum_i c_i (-1)^n binom-rising(r_i, n) (-j b_i)^(-r_i-n),
/// so the answer is an exact integer rather than a fitted slope.
/// Requires lim s F(s) = 0, i.e. no pole of F at the origin.
inline int small_s_order(const TransformModel& model) {
    for (const auto& term : model.terms)
        if (term.beta == 0.0 && std::abs(term.c) > 0.0)
            throw precondition_error("small_s_order: model has a pole at s = 0, so s F(s) does not vanish");

    constexpr int kMaxSearch = 8;
    for (int n = 0; n < kMaxSearch; ++n) {
        complexd coeff{0.0, 0.0};
        double scale = 0.0;
        for (const auto& term : model.terms) {
            double rising = 1.0;
            for (int i = 0; i < n; ++i) rising *= term.r + i;
            double fact = 1.0;
            for (int i = 2; i <= n; ++i) fact *= i;
            const complexd pole = -complexd(0.0, term.beta);
            const complexd deriv = term.c * ((n % 2 == 0) ? 1.0 : -1.0) * rising / fact / ipow(pole, term.r + n);
            coeff += deriv;
            scale += std::abs(term.c) * rising / fact / ipow(std::abs(term.beta), term.r + n);
        }
        if (std::abs(coeff) > 1e-9 * scale) return n + 1;
    }
    throw accuracy_error("small_s_order: no nonzero Taylor coefficient of F found up to order " +
                         std::to_string(kMaxSearch));
}

/// Laplace image of the first running average, in closed form:
/// per term, integrate c / (z (z - j b)^r) from s to infinity by partial
/// fractions. Exact up to rounding; the numeric iterated_transform is
/// cross-checked against this in the tests.
inline double first_average_transform(const TransformModel& model, double s) {
    if (!(s > 0.0) || !std::isfinite(s)) throw domain_error("first_average_transform: s must be > 0");
    complexd total{0.0, 0.0};
    for (const auto& term : model.terms) {
        if (term.beta == 0.0) {
            total += term.c / (static_cast<double>(term.r) * ipow(complexd(s, 0.0), term.r));
            continue;
        }
        const complexd w(0.0, term.beta);
        const complexd a = 1.0 / ipow(-w, term.r);
        complexd val = a * std::log((s - w) / s);
        for (int l = 2; l <= term.r; ++l) {
            const complexd b_l = ((term.r - l) % 2 == 0 ? 1.0 : -1.0) / ipow(w, term.r - l + 1);
            val += b_l / (static_cast<double>(l - 1) * ipow(s - w, l - 1));
        }
        total += term.c * val;
    }
    return total.real();
}

/// Points per decade of the log-scale quadrature grid used by
/// iterated_transform. The integrand varies on multiplicative scales, so the
/// substitution zeta = s e^u equidistributes resolution.
inline constexpr int kTransformPointsPerDecade = 200;

/// Psi_m(s): the m-fold image of the running-average operator applied to F,
///   Psi_m(s) = int_s^inf dz/z Psi_{m-1}(z),  Psi_0 = F,
/// computed by suffix trapezoid sums on a shared log grid (O(m n) total).
/// Poles at the origin integrate in closed form (c/(r^m s^r) per level, which
/// covers the 1/zeta borderline of constants exactly); remaining terms get an
/// analytic two-term tail beyond zeta_max.
inline double iterated_transform(const TransformModel& model, int m, double s) {
    if (m < 1 || m > 3) throw config_error("iterated_transform: m must be in {1, 2, 3}");
    if (!(s > 0.0) || !std::isfinite(s)) throw domain_error("iterated_transform: s must be finite and > 0");

    complexd exact{0.0, 0.0};
    std::vector<TransformTerm> numeric;
    double beta_max = 0.0;
    for (const auto& term : model.terms) {
        if (term.beta == 0.0) {
            exact += term.c / (ipow(static_cast<double>(term.r), m) * ipow(complexd(s, 0.0), term.r));
        } else {
            numeric.push_back(term);
            beta_max = std::max(beta_max, std::abs(term.beta));
        }
    }
    if (numeric.empty()) return exact.real();

    const double zeta_max = std::max({1e3, 1e3 * beta_max, 1e3 * s});
    const double U = std::log(zeta_max / s);
    const auto n = static_cast<std::size_t>(
                       std::ceil(kTransformPointsPerDecade * U / std::numbers::ln10)) + 1;
    const double du = U / static_cast<double>(n - 1);

    std::vector<double> cur(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double zeta = s * std::exp(static_cast<double>(i) * du);
        complexd v{0.0, 0.0};
        for (const auto& term : numeric) v += term.c / ipow(complexd(zeta, -term.beta), term.r);
        cur[i] = v.real();
    }

    // Analytic tail of level k beyond zeta_max: per term,
    //   int_Z^inf zeta^{-1} (zeta - j b)^{-r} dzeta = Z^{-r}/r + r j b Z^{-r-1}/(r+1) + O(Z^{-r-2}),
    // and each further averaging divides the leading powers by r resp. r+1.
    const auto tail_at = [&](int level) {
        complexd tail{0.0, 0.0};
        for (const auto& term : numeric) {
            const complexd jb(0.0, term.beta);
            const double r = term.r;
            tail += term.c * (1.0 / (ipow(r, level) * ipow(zeta_max, term.r)) +
                              r * jb / (ipow(r + 1.0, level) * ipow(zeta_max, term.r + 1)));
        }
        return tail.real();
    };

    double value = 0.0;
    std::vector<double> deriv(n);
    for (int level = 1; level <= m; ++level) {
        const double tail = tail_at(level);
        // Suffix trapezoid with the Euler-Maclaurin endpoint correction
        //   int_a^b g du = T - du^2/12 (g'(b) - g'(a)) + O(du^4),
        // g' from second-order differences, so each level stays 4th order.
        deriv[0] = (-3.0 * cur[0] + 4.0 * cur[1] - cur[2]) / (2.0 * du);
        deriv[n - 1] = (3.0 * cur[n - 1] - 4.0 * cur[n - 2] + cur[n - 3]) / (2.0 * du);
        for (std::size_t i = 1; i + 1 < n; ++i) deriv[i] = (cur[i + 1] - cur[i - 1]) / (2.0 * du);
        std::vector<double> next(n);
        double acc = 0.0;
        next[n - 1] = acc;
        for (std::size_t i = n - 1; i > 0; --i) {
            acc += 0.5 * du * (cur[i - 1] + cur[i]);
            next[i - 1] = acc;
        }
        const double correction_scale = du * du / 12.0;
        for (std::size_t i = 0; i < n; ++i)
            next[i] += tail - correction_scale * (deriv[n - 1] - deriv[i]);
        value = next[0];
        if (std::abs(tail) > 1e-3 * (1.0 + std::abs(value)))
            throw accuracy_error("iterated_transform: tail beyond zeta_max = " + std::to_string(zeta_max) +
                                 " contributes " + std::to_string(tail) + " against a value of " +
                                 std::to_string(value) + "; enlarge the grid");
        cur = std::move(next);
    }
    return exact.real() + value;
}

/// Three-way comparison of the time-domain limit, the s-domain limit and the
/// iterated-transform telescoping for one spec.
struct CentralEqualityReport {
    std::optional<int> m;          ///< minimal order found on the time side
    double time_limit = 0.0;
    double laplace_limit = 0.0;
    Verdict laplace_verdict = Verdict::Oscillating;
    struct Sample {
        double s;
        double sF;
        double sPsi;
    };
    std::vector<Sample> samples;   ///< (s, s F(s), s Psi_m(s)) along the ladder
    double max_gap = 0.0;          ///< max |s Psi_m - s F| over the samples
    bool telescoping_ok = true;    ///< gaps shrink along the ladder
    bool agree = false;
    std::string annotation;
    OrderReport order;
};

namespace detail {
inline constexpr double kEqualityAbsTol = 1e-4;
inline constexpr double kEqualityRelTol = 1e-3;
} // namespace detail

/// Run both sides of the final-value comparison for a spec: minimal-order
/// detection on samples over `grid`, the s F(s) ladder limit, and (for
/// 1 <= m <= 3) the s Psi_m(s) telescoping samples. Disagreement is reported
/// in the result, never thrown.
inline CentralEqualityReport verify_central_equality(const SignalSpec& spec, const UniformGrid& grid, int q_max,
                                                     const DetectionPolicy& policy, const LimitLadder& ladder) {
    CentralEqualityReport report;
    const TransformModel model = closed_form_transform(spec);

    report.order = minimal_order(sample_spec(spec, grid), q_max, policy);
    report.m = report.order.m;
    report.time_limit = report.order.limit;

    const LimitEstimate lap = sf_limit(model, ladder);
    report.laplace_verdict = lap.verdict;
    report.laplace_limit = lap.value;

    if (report.m && *report.m >= 1 && *report.m <= 3) {
        std::vector<double> gaps;
        for (double s : ladder.values()) {
            const double sF = s * evaluate_real(model, s);
            const double sPsi = s * iterated_transform(model, *report.m, s);
            report.samples.push_back({s, sF, sPsi});
            gaps.push_back(std::abs(sPsi - sF));
            report.max_gap = std::max(report.max_gap, gaps.back());
        }
        report.telescoping_ok = detail::non_increasing(gaps);
    } else if (report.m && *report.m == 0) {
        report.annotation = "m = 0 is the classical final-value case; no transform-average leg";
    } else if (report.m) {
        report.annotation = "m > 3: transform-average leg not evaluated";
    }

    if (report.order.found() && lap.verdict == Verdict::Converged) {
        const double tol = std::max(detail::kEqualityAbsTol, detail::kEqualityRelTol * std::abs(report.time_limit));
        report.agree = std::abs(report.laplace_limit - report.time_limit) <= tol && report.telescoping_ok;
        if (!report.agree)
            report.annotation = "limits disagree: time " + std::to_string(report.time_limit) + " vs transform " +
                                std::to_string(report.laplace_limit);
    } else if (!report.order.found() && lap.verdict != Verdict::Converged) {
        report.agree = true;
        report.annotation = "no limit on either side (time: not found, transform: " +
                            std::string(to_string(lap.verdict)) + ")";
    } else {
        report.agree = false;
        report.annotation = report.order.found()
                                ? "time side converged but the transform side did not"
                                : "transform side converged but no averaging order did";
    }
    return report;
}

/// Polynomial with real coefficients, ascending powers: p(z) = sum c_k z^k.
using Polynomial = std::vector<double>;

inline double eval_poly(const Polynomial& p, double z) {
    double acc = 0.0;
    for (std::size_t i = p.size(); i > 0; --i) acc = acc * z + p[i - 1];
    return acc;
}

/// Discrete final value: lim_{z->1} (z-1) F(z) for rational F = num/den,
/// evaluated at z = 1 + s along the ladder and extrapolated like sf_limit.
inline LimitEstimate z_side_limit(const Polynomial& num, const Polynomial& den, const LimitLadder& ladder) {
    bool den_nonzero = false;
    for (double c : den) den_nonzero |= (c != 0.0);
    if (!den_nonzero) throw domain_error("z_side_limit: zero denominator polynomial");

    const std::vector<double> svals = ladder.values();
    std::vector<double> gvals(svals.size());
    for (std::size_t k = 0; k < svals.size(); ++k) {
        const double z = 1.0 + svals[k];
        const double d = eval_poly(den, z);
        if (std::abs(d) < 1e-300)
            throw domain_error("z_side_limit: denominator vanishes at z = " + std::to_string(z));
        gvals[k] = svals[k] * eval_poly(num, z) / d;
    }
    constexpr double kGrowthSlopeTol = 0.1;
    return detail::extrapolate_to_zero(svals, gvals, ladder.degree, kGrowthSlopeTol);
}

} // namespace runavg
