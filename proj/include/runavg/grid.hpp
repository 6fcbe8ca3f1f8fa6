#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "runavg/errors.hpp"

namespace runavg {

/// Uniform time grid t_k = t0 + k*dt, k = 0..n-1.
///
/// Grids that feed the averaging operators must start at t0 = 0; a grid with
/// t0 > 0 is still a valid container (e.g. for CSV storage) but the averaging
/// entry points reject it.
class UniformGrid {
public:
    UniformGrid(double t0, double dt, std::size_t n) : t0_(t0), dt_(dt), n_(n) {
        if (!std::isfinite(t0) || t0 < 0.0)
            throw config_error("UniformGrid: t0 must be finite and >= 0, got " + std::to_string(t0));
        if (!std::isfinite(dt) || dt <= 0.0)
            throw config_error("UniformGrid: dt must be finite and > 0, got " + std::to_string(dt));
        if (n < 2)
            throw config_error("UniformGrid: need at least 2 samples, got " + std::to_string(n));
    }

    /// Grid covering [0, T] with step dt (n = round(T/dt) + 1 points).
    static UniformGrid from_span(double dt, double T) {
        if (!std::isfinite(T) || T <= 0.0)
            throw config_error("UniformGrid: span T must be finite and > 0");
        return UniformGrid(0.0, dt, static_cast<std::size_t>(std::llround(T / dt)) + 1);
    }

    [[nodiscard]] double t0() const { return t0_; }
    [[nodiscard]] double dt() const { return dt_; }
    [[nodiscard]] std::size_t size() const { return n_; }
    [[nodiscard]] double time(std::size_t k) const { return t0_ + static_cast<double>(k) * dt_; }
    [[nodiscard]] double span() const { return static_cast<double>(n_ - 1) * dt_; }

    friend bool operator==(const UniformGrid& a, const UniformGrid& b) {
        return a.t0_ == b.t0_ && a.dt_ == b.dt_ && a.n_ == b.n_;
    }

private:
    double t0_;
    double dt_;
    std::size_t n_;
};

/// Samples of a real-valued signal f(t) on a uniform grid. Immutable after
/// construction; all samples are checked finite up front so a stray NaN can
/// never poison a prefix sum downstream.
class UniformSignal {
public:
    UniformSignal(UniformGrid grid, std::vector<double> samples)
        : grid_(grid), samples_(std::move(samples)) {
        if (samples_.size() != grid_.size())
            throw data_error("UniformSignal: " + std::to_string(samples_.size()) + " samples for a grid of " +
                             std::to_string(grid_.size()) + " points");
        for (std::size_t k = 0; k < samples_.size(); ++k)
            if (!std::isfinite(samples_[k]))
                throw data_error("UniformSignal: non-finite sample at index " + std::to_string(k));
    }

    [[nodiscard]] const UniformGrid& grid() const { return grid_; }
    [[nodiscard]] const std::vector<double>& samples() const { return samples_; }
    [[nodiscard]] std::size_t size() const { return samples_.size(); }
    [[nodiscard]] double operator[](std::size_t k) const { return samples_[k]; }

private:
    UniformGrid grid_;
    std::vector<double> samples_;
};

/// A finite real sequence f[k], k = 0..n-1.
class DiscreteSequence {
public:
    explicit DiscreteSequence(std::vector<double> values) : values_(std::move(values)) {
        for (std::size_t k = 0; k < values_.size(); ++k)
            if (!std::isfinite(values_[k]))
                throw data_error("DiscreteSequence: non-finite value at index " + std::to_string(k));
    }

    [[nodiscard]] const std::vector<double>& values() const { return values_; }
    [[nodiscard]] std::size_t size() const { return values_.size(); }
    [[nodiscard]] bool empty() const { return values_.empty(); }
    [[nodiscard]] double operator[](std::size_t k) const { return values_[k]; }

private:
    std::vector<double> values_;
};

} // namespace runavg
