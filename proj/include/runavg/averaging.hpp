#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "runavg/errors.hpp"
#include "runavg/grid.hpp"

namespace runavg {

/// Hard cap on the iterated-averaging order. Beyond this, double-precision
/// rounding exceeds what another smoothing pass can reveal.
inline constexpr int kMaxAverageOrder = 12;

/// Expanding running average psi(t_k) = (1/t_k) * integral_0^{t_k} f,
/// by cumulative trapezoidal quadrature evaluated in running-mean form:
/// with equal panel widths, the prefix integral divided by t_k is the
/// arithmetic mean of the trapezoid panel means, so we update it as
///   a_k = a_{k-1} + (panel_k - a_{k-1}) / k.
/// This keeps constants exact fixed points and stays O(1) per sample.
/// psi(0) is defined as f(0), the t -> 0 limit of the average.
inline UniformSignal running_average(const UniformSignal& signal) {
    const UniformGrid& grid = signal.grid();
    if (grid.t0() != 0.0)
        throw precondition_error("running_average: grid must start at t0 = 0 (got t0 = " +
                                 std::to_string(grid.t0()) + ")");
    const std::vector<double>& f = signal.samples();
    std::vector<double> out(f.size());
    out[0] = f[0];
    double a = f[0];
    for (std::size_t k = 1; k < f.size(); ++k) {
        const double panel = 0.5 * (f[k - 1] + f[k]);
        a += (panel - a) / static_cast<double>(k);
        out[k] = a;
    }
    return UniformSignal(grid, std::move(out));
}

/// Adds the constant K to every sample.
inline UniformSignal shift_signal(const UniformSignal& signal, double K) {
    if (!std::isfinite(K)) throw data_error("shift_signal: non-finite shift");
    std::vector<double> out = signal.samples();
    for (double& v : out) v += K;
    return UniformSignal(signal.grid(), std::move(out));
}

/// The family {psi_0 .. psi_Q} of iterated running averages of one signal.
/// level(0) is the signal itself; level(q) = running_average(level(q-1)).
class AverageStack {
public:
    AverageStack(UniformSignal base, std::vector<UniformSignal> levels)
        : base_(std::move(base)), levels_(std::move(levels)) {}

    [[nodiscard]] int max_order() const { return static_cast<int>(levels_.size()); }
    [[nodiscard]] const UniformSignal& base() const { return base_; }

    [[nodiscard]] const UniformSignal& level(int q) const {
        if (q < 0 || q > max_order())
            throw precondition_error("AverageStack: level " + std::to_string(q) + " not computed (Q = " +
                                     std::to_string(max_order()) + ")");
        return q == 0 ? base_ : levels_[static_cast<std::size_t>(q - 1)];
    }

private:
    UniformSignal base_;
    std::vector<UniformSignal> levels_;
};

/// Compute psi_1 .. psi_Q. Cost O(Q*n), sequential across levels. The cap
/// exists because rounding outpaces the information gained past ~12 levels;
/// callers that know better may raise it.
inline AverageStack iterate_average(const UniformSignal& signal, int Q, int cap = kMaxAverageOrder) {
    if (Q < 1 || Q > cap)
        throw config_error("iterate_average: Q must be in [1, " + std::to_string(cap) + "], got " +
                           std::to_string(Q));
    std::vector<UniformSignal> levels;
    levels.reserve(static_cast<std::size_t>(Q));
    const UniformSignal* prev = &signal;
    for (int q = 1; q <= Q; ++q) {
        levels.push_back(running_average(*prev));
        prev = &levels.back();
    }
    return AverageStack(signal, std::move(levels));
}

/// Iterated arithmetic running means of a sequence: level q at index n is the
/// mean of level q-1 over indices 0..n. The mean divides by n+1 (the number
/// of terms), which keeps constants exact; the variant dividing by n differs
/// by O(1/n) and has identical limits.
class DiscreteAverage {
public:
    DiscreteAverage(DiscreteSequence base, std::vector<DiscreteSequence> levels)
        : base_(std::move(base)), levels_(std::move(levels)) {}

    [[nodiscard]] int max_order() const { return static_cast<int>(levels_.size()); }
    [[nodiscard]] const DiscreteSequence& base() const { return base_; }

    [[nodiscard]] const DiscreteSequence& level(int q) const {
        if (q < 0 || q > max_order())
            throw precondition_error("DiscreteAverage: level " + std::to_string(q) + " not computed");
        return q == 0 ? base_ : levels_[static_cast<std::size_t>(q - 1)];
    }

private:
    DiscreteSequence base_;
    std::vector<DiscreteSequence> levels_;
};

inline DiscreteAverage discrete_running_average(const DiscreteSequence& seq, int Q, int cap = kMaxAverageOrder) {
    if (seq.empty()) throw data_error("discrete_running_average: empty sequence");
    if (Q < 1 || Q > cap)
        throw config_error("discrete_running_average: Q must be in [1, " + std::to_string(cap) + "]");
    std::vector<DiscreteSequence> levels;
    levels.reserve(static_cast<std::size_t>(Q));
    const DiscreteSequence* prev = &seq;
    for (int q = 1; q <= Q; ++q) {
        const std::vector<double>& x = prev->values();
        std::vector<double> out(x.size());
        double a = x[0];
        out[0] = a;
        for (std::size_t k = 1; k < x.size(); ++k) {
            a += (x[k] - a) / static_cast<double>(k + 1);
            out[k] = a;
        }
        levels.emplace_back(std::move(out));
        prev = &levels.back();
    }
    return DiscreteAverage(seq, std::move(levels));
}

} // namespace runavg
