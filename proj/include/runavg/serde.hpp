#pragma once

// JSON (de)serialization of specs, policies, ladders, and reports.
// Keys are stable snake_case; nlohmann::json orders keys, so serialized
// reports are byte-deterministic for identical inputs.

#include <complex>
#include <string>
#include <vector>

#include <json.hpp>

#include "runavg/convergence.hpp"
#include "runavg/errors.hpp"
#include "runavg/laplace.hpp"
#include "runavg/signals.hpp"

namespace runavg {

using json = nlohmann::json;

inline json to_json(const SignalSpec& spec) {
    struct Visitor {
        json operator()(const MonomialOsc& s) const {
            return {{"type", "monomial_osc"},
                    {"p", s.p},
                    {"omega", s.omega},
                    {"phase", s.phase == Phase::sin ? "sin" : "cos"},
                    {"scale", s.scale}};
        }
        json operator()(const FourierPoly& s) const {
            json coeffs = json::array();
            for (const auto& [k, c] : s.coefficients)
                coeffs.push_back({{"k", k}, {"re", c.real()}, {"im", c.imag()}});
            return {{"type", "fourier_poly"}, {"p", s.p}, {"omega", s.omega}, {"coefficients", coeffs}};
        }
        json operator()(const AlmostPeriodicPoly& s) const {
            json terms = json::array();
            for (const auto& [lambda, c] : s.terms)
                terms.push_back({{"lambda", lambda}, {"re", c.real()}, {"im", c.imag()}});
            return {{"type", "almost_periodic"}, {"p", s.p}, {"terms", terms}};
        }
        json operator()(const Constant& s) const { return {{"type", "constant"}, {"value", s.value}}; }
        json operator()(const Monomial& s) const {
            return {{"type", "monomial"}, {"p", s.p}, {"scale", s.scale}};
        }
    };
    return std::visit(Visitor{}, spec);
}

inline SignalSpec spec_from_json(const json& j) {
    try {
        const std::string type = j.at("type").get<std::string>();
        if (type == "monomial_osc") {
            MonomialOsc s;
            s.p = j.at("p").get<int>();
            s.omega = j.at("omega").get<double>();
            const std::string phase = j.value("phase", "sin");
            if (phase != "sin" && phase != "cos") throw config_error("spec: phase must be 'sin' or 'cos'");
            s.phase = phase == "sin" ? Phase::sin : Phase::cos;
            s.scale = j.value("scale", 1.0);
            validate(SignalSpec{s});
            return s;
        }
        if (type == "fourier_poly") {
            FourierPoly s;
            s.p = j.at("p").get<int>();
            s.omega = j.at("omega").get<double>();
            for (const auto& c : j.at("coefficients"))
                s.coefficients[c.at("k").get<int>()] = complexd(c.at("re").get<double>(), c.value("im", 0.0));
            validate(SignalSpec{s});
            return s;
        }
        if (type == "almost_periodic") {
            AlmostPeriodicPoly s;
            s.p = j.at("p").get<int>();
            for (const auto& t : j.at("terms"))
                s.terms.emplace_back(t.at("lambda").get<double>(),
                                     complexd(t.at("re").get<double>(), t.value("im", 0.0)));
            validate(SignalSpec{s});
            return s;
        }
        if (type == "constant") {
            Constant s{j.at("value").get<double>()};
            validate(SignalSpec{s});
            return s;
        }
        if (type == "monomial") {
            Monomial s{j.at("p").get<int>(), j.value("scale", 1.0)};
            validate(SignalSpec{s});
            return s;
        }
        // Sugar for the two positive-signal staples.
        if (type == "sin_squared") return make_sin_squared(j.value("p", 0));
        if (type == "abs_sin") return make_abs_sin(j.value("p", 0), j.value("harmonics", 64));
        throw config_error("spec: unknown type '" + type + "'");
    } catch (const json::exception& e) {
        throw config_error(std::string("spec: malformed JSON: ") + e.what());
    }
}

inline json to_json(const DetectionPolicy& p) {
    return {{"tail_fraction", p.tail_fraction}, {"ladder", p.ladder},     {"abs_tol", p.abs_tol},
            {"rel_tol", p.rel_tol},             {"growth_tol", p.growth_tol}, {"min_horizon", p.min_horizon}};
}

inline DetectionPolicy policy_from_json(const json& j, DetectionPolicy base = {}) {
    try {
        base.tail_fraction = j.value("tail_fraction", base.tail_fraction);
        base.ladder = j.value("ladder", base.ladder);
        base.abs_tol = j.value("abs_tol", base.abs_tol);
        base.rel_tol = j.value("rel_tol", base.rel_tol);
        base.growth_tol = j.value("growth_tol", base.growth_tol);
        base.min_horizon = j.value("min_horizon", base.min_horizon);
    } catch (const json::exception& e) {
        throw config_error(std::string("policy: malformed JSON: ") + e.what());
    }
    return base;
}

inline json to_json(const LimitLadder& l) {
    return {{"s0", l.s0}, {"rho", l.rho}, {"count", l.count}, {"degree", l.degree}};
}

inline LimitLadder ladder_from_json(const json& j, LimitLadder base = {}) {
    try {
        base.s0 = j.value("s0", base.s0);
        base.rho = j.value("rho", base.rho);
        base.count = j.value("count", base.count);
        base.degree = j.value("degree", base.degree);
    } catch (const json::exception& e) {
        throw config_error(std::string("ladder: malformed JSON: ") + e.what());
    }
    return base;
}

inline json to_json(const TransformModel& model) {
    json terms = json::array();
    for (const auto& t : model.terms)
        terms.push_back({{"re", t.c.real()}, {"im", t.c.imag()}, {"beta", t.beta}, {"r", t.r}});
    return {{"terms", terms}, {"origin", to_json(model.origin)}};
}

inline json to_json(const LimitEstimate& e) {
    return {{"verdict", to_string(e.verdict)},
            {"value", e.value},
            {"oscillation", e.oscillation},
            {"growth_exponent", e.growth_exponent},
            {"horizon", e.horizon}};
}

inline json to_json(const OrderReport& r) {
    json levels = json::array();
    for (const auto& e : r.per_level) levels.push_back(to_json(e));
    json j{{"found", r.found()},
           {"q_max", r.q_max},
           {"certified", r.certified},
           {"levels", levels}};
    if (r.found()) {
        j["m"] = *r.m;
        j["limit"] = r.limit;
    } else {
        j["m"] = nullptr;
    }
    if (!r.note.empty()) j["note"] = r.note;
    return j;
}

inline json to_json(const MatchReport& r) {
    return {{"m", r.m},
            {"means_agree", r.means_agree},
            {"oscillation_monotone", r.oscillation_monotone},
            {"max_pair_deviation", r.max_pair_deviation},
            {"tail_means", r.tail_means},
            {"tail_oscillations", r.tail_oscillations}};
}

inline json to_json(const CentralEqualityReport& r) {
    json samples = json::array();
    for (const auto& s : r.samples) samples.push_back({{"s", s.s}, {"sF", s.sF}, {"sPsi", s.sPsi}});
    json j{{"time_limit", r.time_limit},
           {"laplace_limit", r.laplace_limit},
           {"laplace_verdict", to_string(r.laplace_verdict)},
           {"samples", samples},
           {"max_gap", r.max_gap},
           {"telescoping_ok", r.telescoping_ok},
           {"agree", r.agree},
           {"order", to_json(r.order)}};
    j["m"] = r.m ? json(*r.m) : json(nullptr);
    if (!r.annotation.empty()) j["annotation"] = r.annotation;
    return j;
}

} // namespace runavg
