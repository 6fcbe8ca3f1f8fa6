#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "runavg/averaging.hpp"
#include "runavg/errors.hpp"
#include "runavg/grid.hpp"
#include "runavg/signals.hpp"

namespace runavg {

enum class Verdict { Converged, Oscillating, Diverging };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Converged: return "converged";
        case Verdict::Oscillating: return "oscillating";
        case Verdict::Diverging: return "diverging";
    }
    return "?";
}

/// Thresholds and window shape for trend classification.
struct DetectionPolicy {
    double tail_fraction = 0.25; ///< window is the trailing fraction of each horizon
    int ladder = 4;              ///< number of sub-horizons T, T/2, ... T/2^(ladder-1)
    double abs_tol = 1e-4;
    double rel_tol = 1e-3;
    double growth_tol = 0.2;     ///< log-log envelope slope above which a tail counts as growing
    double min_horizon = 100.0;

    [[nodiscard]] double tolerance_at(double mean) const { return abs_tol + rel_tol * std::abs(mean); }
};

/// Default policy sized for a given signal: the detection horizon should span
/// many oscillation periods, so min_horizon is 50 periods of the slowest
/// frequency the spec exposes (100 when there is none).
inline DetectionPolicy default_policy_for(const SignalSpec& spec) {
    DetectionPolicy policy;
    if (auto w = min_positive_frequency(spec))
        policy.min_horizon = 50.0 * (2.0 * std::numbers::pi / *w);
    return policy;
}

/// Classification of the tail of one series.
struct LimitEstimate {
    Verdict verdict = Verdict::Oscillating;
    double value = 0.0;           ///< tail mean; the limit when Converged
    double oscillation = 0.0;     ///< sup - inf over the final tail window
    double growth_exponent = 0.0; ///< fitted log-log slope of the tail envelope
    double horizon = 0.0;         ///< horizon the verdict was formed at
};

namespace detail {

struct TailWindow {
    double horizon;
    double osc;
    double mean;
    double env;
};

/// Tail stats over [(1-tail_fraction)*H, H] for each ladder horizon H,
/// ordered by increasing horizon (the last entry is the full span).
inline std::vector<TailWindow> tail_windows(const UniformSignal& series, const DetectionPolicy& policy,
                                            double horizon) {
    const double dt = series.grid().dt();
    const std::vector<double>& y = series.samples();
    std::vector<TailWindow> out;
    out.reserve(static_cast<std::size_t>(policy.ladder));
    for (int j = policy.ladder - 1; j >= 0; --j) {
        const double H = horizon / static_cast<double>(1u << j);
        const auto i1 = static_cast<std::size_t>(std::llround(H / dt));
        const auto i0 = static_cast<std::size_t>(std::llround((1.0 - policy.tail_fraction) * H / dt));
        if (i1 >= y.size() || i1 < i0 + 4)
            throw inconclusive_error("detect_limit: tail window at horizon " + std::to_string(H) +
                                     " has too few samples");
        double lo = y[i0], hi = y[i0], sum = 0.0, env = 0.0;
        for (std::size_t k = i0; k <= i1; ++k) {
            lo = std::min(lo, y[k]);
            hi = std::max(hi, y[k]);
            env = std::max(env, std::abs(y[k]));
            sum += y[k];
        }
        out.push_back({H, hi - lo, sum / static_cast<double>(i1 - i0 + 1), env});
    }
    return out;
}

/// Least-squares slope of y against x.
inline double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const auto n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) { mx += x[i]; my += y[i]; }
    mx /= n; my /= n;
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        num += (x[i] - mx) * (y[i] - my);
        den += (x[i] - mx) * (x[i] - mx);
    }
    return den > 0.0 ? num / den : 0.0;
}

// Oscillations must shrink as the horizon doubles; a 5% multiplicative slack
// absorbs window-boundary jitter without letting a flat trend through.
inline bool non_increasing(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] > 1.05 * v[i - 1] + 1e-12) return false;
    return true;
}

inline LimitEstimate classify_windows(const std::vector<TailWindow>& rungs, const DetectionPolicy& policy) {
    const TailWindow& final_rung = rungs.back();

    std::vector<double> oscs;
    oscs.reserve(rungs.size());
    for (const auto& r : rungs) oscs.push_back(r.osc);

    LimitEstimate est;
    est.value = final_rung.mean;
    est.oscillation = final_rung.osc;
    est.horizon = final_rung.horizon;

    if (non_increasing(oscs) && final_rung.osc <= policy.tolerance_at(final_rung.mean)) {
        est.verdict = Verdict::Converged;
        return est;
    }

    std::vector<double> lx, ly;
    for (const auto& r : rungs) {
        lx.push_back(std::log(r.horizon));
        ly.push_back(std::log(std::max(r.env, 1e-300)));
    }
    est.growth_exponent = ls_slope(lx, ly);
    est.verdict = est.growth_exponent > policy.growth_tol ? Verdict::Diverging : Verdict::Oscillating;
    return est;
}

} // namespace detail

/// Classify the tail of a series on [0, T]: Converged (tail oscillation
/// shrinks monotonically across the horizon ladder and ends below tolerance),
/// Diverging (tail envelope grows with log-log slope above growth_tol), or
/// Oscillating otherwise. The converged value is the final tail mean.
///
/// Throws inconclusive_error when T < policy.min_horizon or the windows are
/// too thin to measure; that is "cannot tell", not a verdict.
inline LimitEstimate detect_limit(const UniformSignal& series, const DetectionPolicy& policy) {
    if (series.grid().t0() != 0.0)
        throw precondition_error("detect_limit: series must start at t = 0");
    if (policy.tail_fraction <= 0.0 || policy.tail_fraction > 0.5)
        throw config_error("detect_limit: tail_fraction must be in (0, 1/2]");
    if (policy.ladder < 1 || policy.ladder > 16)
        throw config_error("detect_limit: ladder must be in [1, 16]");
    const double T = series.grid().span();
    if (T < policy.min_horizon)
        throw inconclusive_error("detect_limit: horizon " + std::to_string(T) + " is below min_horizon " +
                                 std::to_string(policy.min_horizon));
    return detail::classify_windows(detail::tail_windows(series, policy, T), policy);
}

/// Result of the minimal-order search.
struct OrderReport {
    std::optional<int> m;                ///< least order whose average converges
    double limit = 0.0;                  ///< converged value at level m
    bool certified = false;              ///< level m-1 also failed to converge at half the horizon
    int q_max = 0;
    std::vector<LimitEstimate> per_level; ///< estimates for q = 0..q_max
    std::string note;

    [[nodiscard]] bool found() const { return m.has_value(); }
};

namespace detail {

inline UniformSignal truncate_to(const UniformSignal& s, double horizon) {
    const double dt = s.grid().dt();
    const auto n = static_cast<std::size_t>(std::llround(horizon / dt)) + 1;
    std::vector<double> head(s.samples().begin(), s.samples().begin() + static_cast<std::ptrdiff_t>(n));
    return UniformSignal(UniformGrid(0.0, dt, n), std::move(head));
}

} // namespace detail

/// Find the minimal averaging order m at which the iterated running average
/// of `signal` converges. Levels are produced streaming (only the current and
/// previous level are alive), each classified by detect_limit. NotFound is a
/// legitimate outcome (e.g. pure monomials), reported with per-level
/// diagnostics rather than an exception.
///
/// Minimality is double-checked: when m >= 1 is found, level m-1 is
/// re-classified on the first half of the data, so its failure to converge is
/// stable under doubling the horizon from T/2 to T.
inline OrderReport minimal_order(const UniformSignal& signal, int q_max, const DetectionPolicy& policy,
                                 int cap = kMaxAverageOrder) {
    if (q_max < 1 || q_max > cap)
        throw config_error("minimal_order: q_max must be in [1, " + std::to_string(cap) + "]");

    OrderReport report;
    report.q_max = q_max;

    const double T = signal.grid().span();
    UniformSignal prev = signal;
    for (int q = 0; q <= q_max; ++q) {
        UniformSignal cur = q == 0 ? signal : running_average(prev);
        LimitEstimate est;
        try {
            est = detect_limit(cur, policy);
        } catch (const inconclusive_error& e) {
            report.note = std::string("inconclusive at level ") + std::to_string(q) + ": " + e.what();
            return report; // same horizon at every level, so no level can do better
        }
        report.per_level.push_back(est);

        if (!report.m && est.verdict == Verdict::Converged) {
            report.m = q;
            report.limit = est.value;
            if (q == 0) {
                report.certified = true;
            } else {
                try {
                    DetectionPolicy half = policy;
                    half.min_horizon = std::min(policy.min_horizon, T / 2.0);
                    const LimitEstimate below = detect_limit(detail::truncate_to(prev, T / 2.0), half);
                    report.certified = below.verdict != Verdict::Converged;
                } catch (const inconclusive_error&) {
                    report.certified = false;
                }
            }
        }
        prev = std::move(cur);
    }
    if (!report.m) report.note = "no level converged up to q_max";
    return report;
}

/// Shared-asymptotics check across the levels m, m+1, m+2 of a stack:
/// their tail means should agree pairwise within 10x the detection tolerance,
/// and further smoothing should not enlarge the tail oscillation. Both checks
/// are reported as data, not enforced.
struct MatchReport {
    int m = 0;
    bool means_agree = false;
    bool oscillation_monotone = false;
    double max_pair_deviation = 0.0;
    std::vector<double> tail_means;        ///< levels m, m+1, m+2
    std::vector<double> tail_oscillations;
};

inline MatchReport asymptotic_match(const AverageStack& stack, int m, const DetectionPolicy& policy) {
    if (m < 0 || stack.max_order() < m + 2)
        throw precondition_error("asymptotic_match: stack must be computed to at least m + 2 levels");

    MatchReport report;
    report.m = m;
    const double T = stack.base().grid().span();
    DetectionPolicy window_policy = policy;
    window_policy.ladder = 1; // only the full-horizon tail window matters here
    for (int n = 0; n < 3; ++n) {
        const auto rungs = detail::tail_windows(stack.level(m + n), window_policy, T);
        report.tail_means.push_back(rungs.back().mean);
        report.tail_oscillations.push_back(rungs.back().osc);
    }
    double dev = 0.0;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = i + 1; j < 3; ++j)
            dev = std::max(dev, std::abs(report.tail_means[i] - report.tail_means[j]));
    report.max_pair_deviation = dev;
    report.means_agree = dev <= 10.0 * policy.tolerance_at(report.tail_means.front());
    report.oscillation_monotone = detail::non_increasing(report.tail_oscillations);
    return report;
}

} // namespace runavg
