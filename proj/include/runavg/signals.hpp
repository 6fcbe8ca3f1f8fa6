#pragma once

#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "runavg/errors.hpp"
#include "runavg/grid.hpp"

namespace runavg {

using complexd = std::complex<double>;

/// Integer power by repeated multiplication (exact for small exponents,
/// avoids pow()'s exp/log round trip).
template <typename T>
[[nodiscard]] T ipow(T base, int e) {
    T acc{1};
    for (int i = 0; i < e; ++i) acc *= base;
    return acc;
}

/// p! as an exact double; capped where doubles stay exact integers.
inline double factorial(int p) {
    if (p < 0 || p > 12)
        throw config_error("factorial: p must be in [0, 12] for exact evaluation");
    double f = 1.0;
    for (int i = 2; i <= p; ++i) f *= i;
    return f;
}

enum class Phase { sin, cos };

/// f(t) = scale * t^p * sin(omega t)   (or cos).
struct MonomialOsc {
    int p = 0;
    double omega = 1.0;
    Phase phase = Phase::sin;
    double scale = 1.0;
};

/// f(t) = t^p * Re( sum_k c_k e^{j k omega t} ), a finite Fourier sum times a
/// monomial. The coefficient map must satisfy c_{-k} = conj(c_k) so the signal
/// is real-valued.
struct FourierPoly {
    int p = 0;
    double omega = 1.0;
    std::map<int, complexd> coefficients;
};

/// f(t) = t^p * Re( sum_k c_k e^{j lambda_k t} ) with real frequencies
/// lambda_k that need not be commensurate. Terms must come in conjugate
/// frequency pairs (or have lambda_k = 0 with real c_k).
struct AlmostPeriodicPoly {
    int p = 0;
    std::vector<std::pair<double, complexd>> terms; // (lambda_k, c_k)
};

struct Constant {
    double value = 0.0;
};

/// f(t) = scale * t^p with p >= 1; the canonical signal for which no
/// averaging order produces a limit.
struct Monomial {
    int p = 1;
    double scale = 1.0;
};

using SignalSpec = std::variant<MonomialOsc, FourierPoly, AlmostPeriodicPoly, Constant, Monomial>;

namespace detail {
inline constexpr double kConjTol = 1e-12;

inline bool conj_close(const complexd& a, const complexd& b) {
    const double scale = 1.0 + std::abs(a) + std::abs(b);
    return std::abs(a - std::conj(b)) <= kConjTol * scale;
}
} // namespace detail

/// Check the structural invariants of a spec; throws config_error on violation.
inline void validate(const SignalSpec& spec) {
    struct Visitor {
        void operator()(const MonomialOsc& s) const {
            if (s.p < 0) throw config_error("MonomialOsc: p must be >= 0");
            if (!(s.omega > 0.0) || !std::isfinite(s.omega))
                throw config_error("MonomialOsc: omega must be finite and > 0");
            if (!std::isfinite(s.scale)) throw config_error("MonomialOsc: non-finite scale");
        }
        void operator()(const FourierPoly& s) const {
            if (s.p < 0) throw config_error("FourierPoly: p must be >= 0");
            if (!(s.omega > 0.0) || !std::isfinite(s.omega))
                throw config_error("FourierPoly: omega must be finite and > 0");
            for (const auto& [k, c] : s.coefficients) {
                auto it = s.coefficients.find(-k);
                if (it == s.coefficients.end() || !detail::conj_close(c, it->second))
                    throw config_error("FourierPoly: coefficients must satisfy c(-k) = conj(c(k)); violated at k=" +
                                       std::to_string(k));
            }
        }
        void operator()(const AlmostPeriodicPoly& s) const {
            if (s.p < 0) throw config_error("AlmostPeriodicPoly: p must be >= 0");
            for (const auto& [lambda, c] : s.terms) {
                if (!std::isfinite(lambda)) throw config_error("AlmostPeriodicPoly: non-finite frequency");
                if (lambda == 0.0) {
                    if (std::abs(c.imag()) > detail::kConjTol * (1.0 + std::abs(c)))
                        throw config_error("AlmostPeriodicPoly: coefficient at lambda=0 must be real");
                    continue;
                }
                bool paired = false;
                for (const auto& [mu, d] : s.terms)
                    if (mu == -lambda && detail::conj_close(c, d)) { paired = true; break; }
                if (!paired)
                    throw config_error("AlmostPeriodicPoly: term at lambda=" + std::to_string(lambda) +
                                       " has no conjugate partner at -lambda");
            }
        }
        void operator()(const Constant& s) const {
            if (!std::isfinite(s.value)) throw config_error("Constant: non-finite value");
        }
        void operator()(const Monomial& s) const {
            if (s.p < 1) throw config_error("Monomial: p must be >= 1");
            if (!std::isfinite(s.scale)) throw config_error("Monomial: non-finite scale");
        }
    };
    std::visit(Visitor{}, spec);
}

/// Evaluate a spec at time t >= 0.
inline double eval_spec(const SignalSpec& spec, double t) {
    if (!std::isfinite(t) || t < 0.0)
        throw domain_error("eval_spec: t must be finite and >= 0, got " + std::to_string(t));
    struct Visitor {
        double t;
        double operator()(const MonomialOsc& s) const {
            const double osc = s.phase == Phase::sin ? std::sin(s.omega * t) : std::cos(s.omega * t);
            return s.scale * ipow(t, s.p) * osc;
        }
        double operator()(const FourierPoly& s) const {
            complexd sum{0.0, 0.0};
            for (const auto& [k, c] : s.coefficients)
                sum += c * std::exp(complexd(0.0, k * s.omega * t));
            return ipow(t, s.p) * sum.real();
        }
        double operator()(const AlmostPeriodicPoly& s) const {
            complexd sum{0.0, 0.0};
            for (const auto& [lambda, c] : s.terms)
                sum += c * std::exp(complexd(0.0, lambda * t));
            return ipow(t, s.p) * sum.real();
        }
        double operator()(const Constant& s) const { return s.value; }
        double operator()(const Monomial& s) const { return s.scale * ipow(t, s.p); }
    };
    return std::visit(Visitor{t}, spec);
}

/// Sample a spec on a grid; samples[k] = eval_spec(spec, grid.time(k)).
inline UniformSignal sample_spec(const SignalSpec& spec, const UniformGrid& grid) {
    std::vector<double> samples(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k)
        samples[k] = eval_spec(spec, grid.time(k));
    return UniformSignal(grid, std::move(samples));
}

/// Substitution data for reducing t^p sin(a t) to the unit-frequency case:
///   <mu^p sin(a mu)>_t = factor * <tau^p sin(tau)>_{a t},  factor = a^{-p}.
/// The caller applies the horizon substitution t -> a*t.
struct RescaledSpec {
    MonomialOsc unit;  ///< same spec with omega = 1
    double factor;     ///< a^{-p}
};

inline RescaledSpec rescale_time(const MonomialOsc& spec) {
    MonomialOsc unit = spec;
    unit.omega = 1.0;
    return RescaledSpec{unit, ipow(1.0 / spec.omega, spec.p)};
}

/// Smallest positive oscillation frequency present in the spec, if any.
/// Used to size detection horizons in whole periods.
inline std::optional<double> min_positive_frequency(const SignalSpec& spec) {
    struct Visitor {
        std::optional<double> operator()(const MonomialOsc& s) const { return s.omega; }
        std::optional<double> operator()(const FourierPoly& s) const {
            std::optional<double> best;
            for (const auto& [k, c] : s.coefficients) {
                if (k == 0 || std::abs(c) == 0.0) continue;
                const double w = std::abs(k) * s.omega;
                if (!best || w < *best) best = w;
            }
            return best;
        }
        std::optional<double> operator()(const AlmostPeriodicPoly& s) const {
            std::optional<double> best;
            for (const auto& [lambda, c] : s.terms) {
                if (lambda == 0.0 || std::abs(c) == 0.0) continue;
                const double w = std::abs(lambda);
                if (!best || w < *best) best = w;
            }
            return best;
        }
        std::optional<double> operator()(const Constant&) const { return std::nullopt; }
        std::optional<double> operator()(const Monomial&) const { return std::nullopt; }
    };
    return std::visit(Visitor{}, spec);
}

/// t^p sin^2(t) as a FourierPoly: sin^2 t = 1/2 - cos(2t)/2 exactly.
inline FourierPoly make_sin_squared(int p = 0) {
    FourierPoly s;
    s.p = p;
    s.omega = 2.0;
    s.coefficients[0] = 0.5;
    s.coefficients[1] = -0.25;
    s.coefficients[-1] = -0.25;
    return s;
}

/// t^p |sin t| via the Fourier series of |sin|, truncated at `harmonics`
/// cosine terms. Truncation error is bounded by (2/pi)/(2N+1) in sup norm.
inline FourierPoly make_abs_sin(int p = 0, int harmonics = 64) {
    if (harmonics < 1 || harmonics > 4096)
        throw config_error("make_abs_sin: harmonics must be in [1, 4096]");
    FourierPoly s;
    s.p = p;
    s.omega = 2.0;
    s.coefficients[0] = 2.0 / std::numbers::pi;
    for (int n = 1; n <= harmonics; ++n) {
        const double c = -(2.0 / std::numbers::pi) / (4.0 * n * n - 1.0);
        s.coefficients[n] = c;
        s.coefficients[-n] = c;
    }
    return s;
}

} // namespace runavg
