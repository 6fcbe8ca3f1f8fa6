// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Tolerances are fixed here, not configurable.

#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "runavg/runavg.hpp"

using namespace runavg;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Outcome {
    bool pass = true;
    std::string detail;
};

using Criterion = std::function<Outcome()>;

UniformSignal sample(const SignalSpec& spec, double dt, double T) {
    return sample_spec(spec, UniformGrid::from_span(dt, T));
}

// --- 1: minimal order of t^p sin(w t) at T = 4000 periods -------------------

Outcome criterion_minimal_order() {
    Outcome out;
    std::ostringstream detail;
    for (int p = 0; p <= 3; ++p) {
        for (double w : {1.0, 2.0}) {
            const SignalSpec spec = MonomialOsc{p, w, Phase::sin, 1.0};
            DetectionPolicy policy = default_policy_for(spec);
            policy.abs_tol = 5e-3; // the minimal level's tail oscillation reaches ~3.7e-3 at p=3
            const double T = 4000.0 * (kTwoPi / w);
            const OrderReport report = minimal_order(sample(spec, 1e-2, T), 6, policy);
            const bool m_ok = report.found() && *report.m == p + 1;
            const bool limit_ok = report.found() && std::abs(report.limit) <= 1e-3;
            if (!(m_ok && limit_ok)) {
                out.pass = false;
                detail << " [p=" << p << " w=" << w << ": m="
                       << (report.found() ? std::to_string(*report.m) : std::string("none"))
                       << " limit=" << report.limit << "]";
            }
        }
    }
    out.detail = out.pass ? "m = p+1 with |limit| <= 1e-3 for all 8 cases"
                          : "expected m = p+1 and |limit| <= 1e-3; failing cases:" + detail.str();
    return out;
}

// --- 2: quadrature accuracy and order against sin(t)/t - cos(t) -------------

Outcome criterion_closed_form_psi1() {
    const auto max_err = [](double dt) {
        const UniformSignal f = sample(SignalSpec{MonomialOsc{1, 1.0, Phase::sin, 1.0}}, dt, 100.0);
        const UniformSignal a = running_average(f);
        double worst = 0.0;
        for (std::size_t k = static_cast<std::size_t>(std::llround(1.0 / dt)); k < a.size(); ++k) {
            const double t = f.grid().time(k);
            worst = std::max(worst, std::abs(a[k] - (std::sin(t) / t - std::cos(t))));
        }
        return worst;
    };
    const double e1 = max_err(1e-3);
    const double e2 = max_err(5e-4);
    const double order = std::log2(e1 / e2);
    Outcome out;
    out.pass = e1 <= 1e-5 && order >= 1.8 && order <= 2.2;
    std::ostringstream detail;
    detail << "max err " << e1 << " at dt=1e-3 (<= 1e-5), observed order " << order << " in [1.8, 2.2]";
    out.detail = detail.str();
    return out;
}

// --- 3: second average of t sin t decays inside the 5/T envelope ------------

Outcome criterion_psi2_decay() {
    const UniformSignal f = sample(SignalSpec{MonomialOsc{1, 1.0, Phase::sin, 1.0}}, 1e-2, 2000.0);
    const AverageStack stack = iterate_average(f, 2);
    Outcome out;
    std::ostringstream detail;
    detail << "|psi_2(T)|*T =";
    for (double T : {200.0, 500.0, 1000.0, 2000.0}) {
        const auto k = static_cast<std::size_t>(std::llround(T / 1e-2));
        const double v = std::abs(stack.level(2)[k]);
        detail << " " << v * T;
        if (v > 5.0 / T) out.pass = false;
    }
    detail << " (all <= 5)";
    out.detail = detail.str();
    return out;
}

// --- 4: transform-side limits ------------------------------------------------

Outcome criterion_laplace_limits() {
    Outcome out;
    std::ostringstream detail;
    LimitLadder ladder;
    ladder.degree = 2;

    for (int p = 0; p <= 4; ++p) {
        for (double w : {1.0, 2.0}) {
            const LimitEstimate est =
                sf_limit(closed_form_transform(SignalSpec{MonomialOsc{p, w, Phase::sin, 1.0}}), ladder);
            if (est.verdict != Verdict::Converged || std::abs(est.value) > 1e-8) {
                out.pass = false;
                detail << " [t^" << p << " sin " << w << "t: " << to_string(est.verdict) << " " << est.value << "]";
            }
        }
    }
    for (double c0 : {0.5, -2.0}) {
        FourierPoly f;
        f.p = 0;
        f.omega = 1.0;
        f.coefficients[0] = c0;
        f.coefficients[2] = complexd(0.3, -0.1);
        f.coefficients[-2] = complexd(0.3, 0.1);
        const LimitEstimate est = sf_limit(closed_form_transform(SignalSpec{f}), ladder);
        if (est.verdict != Verdict::Converged || std::abs(est.value - c0) > 1e-8) {
            out.pass = false;
            detail << " [c0=" << c0 << ": got " << est.value << "]";
        }
    }
    for (int p : {1, 2}) {
        FourierPoly f;
        f.p = p;
        f.omega = 1.0;
        f.coefficients[0] = 1.0;
        f.coefficients[1] = complexd(0.25, 0.0);
        f.coefficients[-1] = complexd(0.25, 0.0);
        const LimitEstimate est = sf_limit(closed_form_transform(SignalSpec{f}), ladder);
        if (est.verdict != Verdict::Diverging || std::abs(est.growth_exponent - p) > 0.1) {
            out.pass = false;
            detail << " [p=" << p << " c0=1: " << to_string(est.verdict) << " power " << est.growth_exponent << "]";
        }
    }
    out.detail = out.pass ? "zero limits within 1e-8, DC limits within 1e-8, divergent powers within 0.1"
                          : "failing:" + detail.str();
    return out;
}

// --- 5: parity of the vanishing order ----------------------------------------

Outcome criterion_parity() {
    Outcome out;
    std::ostringstream detail;
    for (int p = 0; p <= 5; ++p) {
        const int order = small_s_order(closed_form_transform(SignalSpec{MonomialOsc{p, 1.0, Phase::sin, 1.0}}));
        const int expected = p % 2 == 0 ? 1 : 2;
        detail << (p ? " " : "") << "p" << p << "=" << order;
        if (order != expected) out.pass = false;
    }
    out.detail = detail.str() + " (even -> 1, odd -> 2)";
    return out;
}

// --- 6: telescoping of the averaged transform --------------------------------

Outcome criterion_telescoping() {
    Outcome out;
    std::ostringstream detail;
    const LimitLadder ladder;

    // sin t at m = 1: frozen analytic value of s Psi_1 at s = 1e-3 is
    // 1e-3 * (1/2) ln(1 + 1e6) = 6.907755778981887e-3.
    const TransformModel sine = closed_form_transform(SignalSpec{MonomialOsc{0, 1.0, Phase::sin, 1.0}});
    const double sPsi1 = 1e-3 * iterated_transform(sine, 1, 1e-3);
    const bool frozen_ok = std::abs(sPsi1 - 6.907755778981887e-3) <= 1e-5;
    const double s_min = ladder.values().back();
    const double gap_sine = std::abs(s_min * iterated_transform(sine, 1, s_min) - s_min * evaluate_real(sine, s_min));
    const bool small_ok = gap_sine <= 1e-2;

    const TransformModel tsin = closed_form_transform(SignalSpec{MonomialOsc{1, 1.0, Phase::sin, 1.0}});
    bool monotone = true;
    double prev = 0.0;
    bool first = true;
    for (double s : ladder.values()) {
        const double gap = std::abs(s * iterated_transform(tsin, 2, s) - s * evaluate_real(tsin, s));
        if (!first && gap > 1.05 * prev + 1e-12) monotone = false;
        prev = gap;
        first = false;
    }

    out.pass = frozen_ok && small_ok && monotone;
    detail << "s*Psi_1(1e-3) = " << sPsi1 << " (want 6.907756e-3 +- 1e-5), sine gap at s=" << s_min << " is "
           << gap_sine << " (<= 1e-2), t sin t m=2 gaps " << (monotone ? "shrink" : "DO NOT shrink");
    out.detail = detail.str();
    return out;
}

// --- 7: shift equivariance at rounding level ----------------------------------

Outcome criterion_shift() {
    Outcome out;
    double worst = 0.0;
    for (const SignalSpec& spec :
         {SignalSpec{MonomialOsc{0, 1.0, Phase::sin, 1.0}}, SignalSpec{MonomialOsc{1, 1.0, Phase::sin, 1.0}}}) {
        const UniformSignal f = sample(spec, 1e-2, 100.0);
        const AverageStack base = iterate_average(f, 4);
        for (double K : {1.0, 7.0, -3.0}) {
            const AverageStack shifted = iterate_average(shift_signal(f, K), 4);
            for (int q = 1; q <= 4; ++q)
                for (std::size_t k = 0; k < f.size(); ++k)
                    worst = std::max(worst, std::abs(shifted.level(q)[k] - base.level(q)[k] - K));
        }
    }
    out.pass = worst <= 1e-10;
    std::ostringstream detail;
    detail << "max |psi_q(f+K) - psi_q(f) - K| = " << worst << " (<= 1e-10)";
    out.detail = detail.str();
    return out;
}

// --- 8: ODE-simulated t sin t round trip --------------------------------------

Outcome criterion_lti_roundtrip() {
    Outcome out;
    const ResonantSystem sys{{{1.0, 2}}};
    const InitialConditions ic{{ic_for_pure_term(1, 1.0)}};
    const UniformSignal sim = simulate(sys, ic, UniformGrid::from_span(1e-3, 2000.0));

    double norm_err = 0.0;
    for (std::size_t k = 0; k < sim.size(); ++k) {
        const double t = sim.grid().time(k);
        norm_err = std::max(norm_err, std::abs(sim[k] - t * std::sin(t)) / (1.0 + t));
    }

    DetectionPolicy policy = default_policy_for(SignalSpec{MonomialOsc{1, 1.0, Phase::sin, 1.0}});
    policy.abs_tol = 2e-3; // psi_2's tail sup-inf is ~1.4e-3 at T = 2000
    const OrderReport report = minimal_order(sim, 3, policy);

    const bool m_ok = report.found() && *report.m == 2;
    const bool limit_ok = report.found() && std::abs(report.limit) <= 1e-3;
    out.pass = m_ok && limit_ok && norm_err <= 1e-4;
    std::ostringstream detail;
    detail << "m = " << (report.found() ? std::to_string(*report.m) : std::string("none")) << " (want 2), |limit| = "
           << std::abs(report.limit) << " (<= 1e-3), normalized sim error " << norm_err << " (<= 1e-4)";
    out.detail = detail.str();
    return out;
}

// --- 9: discrete side ---------------------------------------------------------

Outcome criterion_discrete() {
    Outcome out;
    std::ostringstream detail;
    LimitLadder ladder;
    ladder.degree = 2;

    std::vector<double> alt(100001);
    for (std::size_t k = 0; k < alt.size(); ++k) alt[k] = (k % 2 == 0) ? 1.0 : -1.0;
    const double mean_alt = discrete_running_average(DiscreteSequence(alt), 1).level(1)[alt.size() - 1];
    const LimitEstimate z_alt = z_side_limit({0.0, 1.0}, {1.0, 1.0}, ladder);

    const double mean_step =
        discrete_running_average(DiscreteSequence(std::vector<double>(100001, 1.0)), 1).level(1)[100000];
    const LimitEstimate z_step = z_side_limit({0.0, 1.0}, {-1.0, 1.0}, ladder);

    const bool alt_ok = std::abs(mean_alt) <= 1e-4 && std::abs(z_alt.value) <= 1e-8;
    const bool step_ok = std::abs(mean_step - 1.0) <= 1e-8 && std::abs(z_step.value - 1.0) <= 1e-8;
    out.pass = alt_ok && step_ok;
    detail << "(-1)^k: mean " << mean_alt << ", z-limit " << z_alt.value << "; step: mean " << mean_step
           << ", z-limit " << z_step.value;
    out.detail = detail.str();
    return out;
}

// --- 10: the monomial counterexample -------------------------------------------

Outcome criterion_counterexample() {
    Outcome out;
    const OrderReport report =
        minimal_order(sample(SignalSpec{Monomial{2, 1.0}}, 1e-2, 1000.0), 12, DetectionPolicy{});
    out.pass = !report.found();
    std::ostringstream detail;
    for (std::size_t q = 0; q < report.per_level.size(); ++q) {
        const LimitEstimate& est = report.per_level[q];
        if (est.verdict != Verdict::Diverging || std::abs(est.growth_exponent - 2.0) > 0.15) {
            out.pass = false;
            detail << " [q=" << q << ": " << to_string(est.verdict) << " power " << est.growth_exponent << "]";
        }
    }
    out.detail = out.pass ? "not found; all 13 levels diverge with power 2 +- 0.15"
                          : "expected every level diverging at power 2:" + detail.str();
    return out;
}

} // namespace

int main() {
    const std::vector<std::pair<std::string, Criterion>> criteria{
        {"1 minimal order of t^p sin(wt)", criterion_minimal_order},
        {"2 closed-form first average", criterion_closed_form_psi1},
        {"3 second-average decay", criterion_psi2_decay},
        {"4 transform-side limits", criterion_laplace_limits},
        {"5 vanishing-order parity", criterion_parity},
        {"6 averaged-transform telescoping", criterion_telescoping},
        {"7 shift equivariance", criterion_shift},
        {"8 resonant-system round trip", criterion_lti_roundtrip},
        {"9 discrete final value", criterion_discrete},
        {"10 monomial counterexample", criterion_counterexample},
    };

    int failures = 0;
    for (const auto& [name, fn] : criteria) {
        Outcome out;
        try {
            out = fn();
        } catch (const std::exception& e) {
            out.pass = false;
            out.detail = std::string("exception: ") + e.what();
        }
        std::printf("[%s] criterion %s: %s\n", out.pass ? "PASS" : "FAIL", name.c_str(), out.detail.c_str());
        std::fflush(stdout);
        if (!out.pass) ++failures;
    }
    if (failures > 0) std::printf("%d of %zu criteria failed\n", failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
