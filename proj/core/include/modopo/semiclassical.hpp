#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "modopo/model.hpp"

namespace modopo {

struct SemiclassicalOptions {
    double rtol = 1e-9;
    double atol = 1e-12;
    /// Period-to-period change, relative to max n0, that counts as converged.
    double periodic_tol = 1e-8;
    int max_periods = 10000;
    std::size_t samples_per_period = 2048;
    /// Allowed relative mismatch between the ODE orbit and the quadrature.
    double cross_tol = 1e-4;
    std::size_t cross_check_points = 4;
    /// Semi-infinite quadrature: stop once the kernel and the tail bound fall
    /// below tail_rel of the accumulated integral and the span exceeds
    /// tail_decay_times relaxation times.
    double tail_rel = 1e-16;
    double tail_decay_times = 10.0;
    double quad_tol = 1e-13;
    std::size_t max_chunks = 200000;
    double threshold_band = kDefaultThresholdBand;
};

struct SemiclassicalTrajectory {
    std::vector<double> t_grid;
    std::vector<double> n0;
    bool converged_periodic = false;
    int periods_to_converge = 0;
};

/// Integrates dn0/dt = 2 n0 (eps(t) - gamma - lambda n0) from t_grid.front()
/// with n0(t_grid.front()) = n0_init and samples n0 on t_grid. Positive
/// initial values are integrated in log space; n0_init = 0 is the exact
/// trivial fixed point.
[[nodiscard]] SemiclassicalTrajectory integrate_n0(const ModelParams& p, std::span<const double> t_grid,
                                                   double n0_init, const SemiclassicalOptions& opts = {});

/// Periodic closed-form photon number,
///   1/n0(t) = 2 lambda int_0^inf exp(-2 int_{t-s}^t (eps - gamma)) ds,
/// evaluated by chunked adaptive Gauss-Kronrod quadrature. Throws
/// BelowThresholdError unless the period-averaged pump is above threshold.
[[nodiscard]] double asymptotic_n0(const ModelParams& p, double t, const SemiclassicalOptions& opts = {});

/// Integrates from n0 = gamma/lambda until the orbit repeats to
/// periodic_tol, then returns one period on a uniform grid over [0, T).
/// The result is cross-checked against asymptotic_n0.
[[nodiscard]] SemiclassicalTrajectory periodic_steady_state(const ModelParams& p,
                                                            const SemiclassicalOptions& opts = {});

/// n0 = 0 on a uniform one-period grid (the below-threshold attractor).
[[nodiscard]] SemiclassicalTrajectory zero_trajectory(const ModelParams& p, std::size_t samples_per_period);

/// Uniform grid j*T/n, j = 0..n-1.
[[nodiscard]] std::vector<double> period_grid(double period, std::size_t n);

}  // namespace modopo
