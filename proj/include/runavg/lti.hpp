#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "runavg/convergence.hpp"
#include "runavg/errors.hpp"
#include "runavg/grid.hpp"
#include "runavg/signals.hpp"

namespace runavg {

/// Homogeneous resonant system: one block per distinct frequency, each block
/// the operator (D^2 + omega^2)^multiplicity. A block of multiplicity m has
/// the p-fold eigenvalues +-j omega with p = m, hence solutions
/// t^gamma sin/cos(omega t) for gamma = 0..m-1 and state dimension 2m.
struct ResonantSystem {
    struct Block {
        double omega = 1.0;
        int multiplicity = 1;
    };
    std::vector<Block> blocks;

    [[nodiscard]] std::size_t dimension() const {
        std::size_t d = 0;
        for (const auto& b : blocks) d += 2 * static_cast<std::size_t>(b.multiplicity);
        return d;
    }
};

inline void validate(const ResonantSystem& system) {
    if (system.blocks.empty()) throw config_error("ResonantSystem: no blocks");
    for (std::size_t i = 0; i < system.blocks.size(); ++i) {
        const auto& b = system.blocks[i];
        if (!(b.omega > 0.0) || !std::isfinite(b.omega))
            throw config_error("ResonantSystem: omega must be finite and > 0");
        if (b.multiplicity < 1) throw config_error("ResonantSystem: multiplicity must be >= 1");
        for (std::size_t j = i + 1; j < system.blocks.size(); ++j)
            if (system.blocks[j].omega == b.omega)
                throw config_error("ResonantSystem: block frequencies must be distinct");
    }
}

/// Initial derivative values y^(j)(0), j = 0..2m-1, one vector per block.
struct InitialConditions {
    std::vector<std::vector<double>> per_block;
};

/// Derivatives at 0 of y(t) = t^p sin(omega t), j = 0..2p+1, from the Leibniz
/// rule: y^(j)(0) = C(j,p) p! omega^(j-p) sin^((j-p))(0), exact integers times
/// powers of omega. These are the conditions that select the pure top-degree
/// solution of a block of multiplicity p+1.
inline std::vector<double> ic_for_pure_term(int p, double omega) {
    if (p < 0 || p > 6)
        throw config_error("ic_for_pure_term: p must be in [0, 6]; derivative magnitudes grow factorially");
    if (!(omega > 0.0) || !std::isfinite(omega)) throw config_error("ic_for_pure_term: omega must be > 0");

    const auto binom = [](int n, int k) {
        double b = 1.0;
        for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
        return b;
    };
    // d^k/dt^k sin at 0 cycles 0, 1, 0, -1.
    const auto sin_deriv0 = [](int k) { return (k % 2 == 0) ? 0.0 : ((k / 2) % 2 == 0 ? 1.0 : -1.0); };

    std::vector<double> ic(static_cast<std::size_t>(2 * p + 2), 0.0);
    for (int j = p; j <= 2 * p + 1; ++j)
        ic[static_cast<std::size_t>(j)] = binom(j, p) * factorial(p) * ipow(omega, j - p) * sin_deriv0(j - p);
    return ic;
}

namespace detail {

/// Companion-form right-hand side of (D^2 + w^2)^m y = 0:
/// x = (y, y', ..., y^(2m-1)), x' = shift, and the top derivative comes from
/// expanding the binomial: D^(2m) y = -sum_{i<m} C(m,i) w^(2(m-i)) D^(2i) y.
struct BlockOde {
    std::vector<double> coeff; // coeff[i] multiplies x[2i], i = 0..m-1

    explicit BlockOde(const ResonantSystem::Block& b) {
        const int m = b.multiplicity;
        coeff.resize(static_cast<std::size_t>(m));
        for (int i = 0; i < m; ++i) {
            double binom = 1.0;
            for (int t = 1; t <= i; ++t) binom = binom * (m - i + t) / t;
            coeff[static_cast<std::size_t>(i)] = -binom * ipow(b.omega * b.omega, m - i);
        }
    }

    void operator()(const std::vector<double>& x, std::vector<double>& dx) const {
        const std::size_t d = x.size();
        for (std::size_t i = 0; i + 1 < d; ++i) dx[i] = x[i + 1];
        double top = 0.0;
        for (std::size_t i = 0; i < coeff.size(); ++i) top += coeff[i] * x[2 * i];
        dx[d - 1] = top;
    }
};

/// One classic fourth-order Runge-Kutta step of size h.
template <typename RHS>
void rk4_step(const RHS& rhs, std::vector<double>& x, double h, std::vector<double>& k1, std::vector<double>& k2,
              std::vector<double>& k3, std::vector<double>& k4, std::vector<double>& tmp) {
    const std::size_t d = x.size();
    rhs(x, k1);
    for (std::size_t i = 0; i < d; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
    rhs(tmp, k2);
    for (std::size_t i = 0; i < d; ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
    rhs(tmp, k3);
    for (std::size_t i = 0; i < d; ++i) tmp[i] = x[i] + h * k3[i];
    rhs(tmp, k4);
    for (std::size_t i = 0; i < d; ++i) x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

} // namespace detail

/// Integrate the system from the given initial conditions and return the sum
/// of the block outputs y(t) on the grid. Fixed-step RK4 at the grid step;
/// the step must resolve the fastest block (omega * dt <= 0.1).
inline UniformSignal simulate(const ResonantSystem& system, const InitialConditions& ic, const UniformGrid& grid) {
    validate(system);
    if (grid.t0() != 0.0) throw precondition_error("simulate: grid must start at t0 = 0");
    if (ic.per_block.size() != system.blocks.size())
        throw precondition_error("simulate: need one initial-condition vector per block");
    for (std::size_t b = 0; b < system.blocks.size(); ++b)
        if (ic.per_block[b].size() != 2 * static_cast<std::size_t>(system.blocks[b].multiplicity))
            throw precondition_error("simulate: block " + std::to_string(b) + " expects " +
                                     std::to_string(2 * system.blocks[b].multiplicity) + " initial values, got " +
                                     std::to_string(ic.per_block[b].size()));
    double omega_max = 0.0;
    for (const auto& b : system.blocks) omega_max = std::max(omega_max, b.omega);
    if (omega_max * grid.dt() > 0.1)
        throw accuracy_error("simulate: step too large for the fastest block (omega*dt = " +
                             std::to_string(omega_max * grid.dt()) + " > 0.1); refine dt");

    std::vector<double> out(grid.size(), 0.0);
    const double h = grid.dt();
    for (std::size_t b = 0; b < system.blocks.size(); ++b) {
        const detail::BlockOde rhs(system.blocks[b]);
        std::vector<double> x = ic.per_block[b];
        const std::size_t d = x.size();
        std::vector<double> k1(d), k2(d), k3(d), k4(d), tmp(d);
        out[0] += x[0];
        for (std::size_t k = 1; k < grid.size(); ++k) {
            detail::rk4_step(rhs, x, h, k1, k2, k3, k4, tmp);
            out[k] += x[0];
        }
    }
    return UniformSignal(grid, std::move(out));
}

/// Simulate t^p sin(omega t) from its exact initial conditions, then run the
/// minimal-order search on the simulated (not analytic) samples. The expected
/// outcome is m = p + 1.
inline OrderReport roundtrip_order_check(int p, double omega, double horizon, double dt,
                                         const DetectionPolicy& policy, int q_max) {
    if (p < 0 || p > 3) throw config_error("roundtrip_order_check: p must be in [0, 3]");
    ResonantSystem system{{{omega, p + 1}}};
    InitialConditions ic{{ic_for_pure_term(p, omega)}};
    const UniformSignal sim = simulate(system, ic, UniformGrid::from_span(dt, horizon));
    return minimal_order(sim, q_max, policy);
}

} // namespace runavg
