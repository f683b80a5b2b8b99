#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "modopo/model.hpp"
#include "modopo/philox.hpp"
#include "modopo/semiclassical.hpp"

namespace modopo {

using cplx = std::complex<double>;

/// Positive-P phase-space point: alpha_i ~ a_i, beta_i ~ a_i^dagger, with
/// alpha and beta independent.
struct PPState {
    cplx alpha1{};
    cplx alpha2{};
    cplx beta1{};
    cplx beta2{};
    double t = 0.0;
};

struct NoiseIncrement {
    cplx dW_alpha1{};
    cplx dW_alpha2{};
    cplx dW_beta1{};
    cplx dW_beta2{};
};

/// Increments with <dW_a1 dW_a2> = (eps - lambda a1 a2) dt,
/// <dW_b1 dW_b2> = (eps - lambda b1 b2) dt and vanishing self-correlations.
/// Consumes exactly four normal variates.
[[nodiscard]] NoiseIncrement sample_noise(const PPState& state, double eps_t, double lambda, double dt,
                                          GaussianStream& rng);

/// Everything a single Euler-Maruyama step needs, derived once per run.
struct StepContext {
    ModelParams params;
    double lambda = 0.0;
    /// Trajectory is diverged once any |component| exceeds this bound.
    double divergence_guard = 0.0;
    bool noise = true;

    StepContext(const ModelParams& p, double divergence_factor = 1e3, bool with_noise = true);
};

/// One Ito Euler-Maruyama step of
///   d a1 = [-(gamma + lambda a2 b2) a1 + eps b2] dt + dW_a1,
///   d b1 = [-(gamma + lambda a2 b2) b1 + eps a2] dt + dW_b1,
/// and the mode-exchanged pair. Throws TrajectoryDiverged past the guard.
[[nodiscard]] PPState step_trajectory(const PPState& state, const StepContext& ctx, double dt, GaussianStream& rng);

struct PositivePOptions {
    double dt = 1e-3;
    double relaxation = 5.0;
    bool noise = true;
    double divergence_factor = 1e3;
    /// Largest tolerated fraction of discarded trajectories.
    double divergence_budget = 1e-3;
    unsigned workers = 1;
    /// Trajectories per reduction block; fixed so results do not depend on workers.
    std::size_t block_size = 64;
    SemiclassicalOptions semiclassical{};
};

struct MomentStat {
    double mean = 0.0;
    double std_error = 0.0;
};

struct EnsembleMoments {
    std::vector<double> t_grid;
    std::vector<MomentStat> n_plus;     ///< a1 b1 + a2 b2
    std::vector<MomentStat> R;          ///< (a1 - b2)(b1 - a2)
    std::vector<MomentStat> Z;          ///< (a1 b1 - a2 b2)^2 + n_plus
    std::vector<MomentStat> V;          ///< 1 + R
    std::vector<MomentStat> n_plus_sq;  ///< n_plus^2
    std::vector<MomentStat> n_plus_R;   ///< n_plus R
    std::vector<MomentStat> n1;         ///< a1 b1
    std::vector<MomentStat> n2;         ///< a2 b2
    /// Finite-difference residuals of the moment equations for n_plus, R and
    /// Z on each grid interval (size t_grid.size() - 1), formed per trajectory
    /// against the Ito drift integrated along the trajectory.
    std::vector<MomentStat> residual_n_plus;
    std::vector<MomentStat> residual_R;
    std::vector<MomentStat> residual_Z;
    std::size_t n_traj = 0;
    std::size_t discarded = 0;
    std::uint64_t seed = 0;
    double dt = 0.0;
    double gamma = 0.0;
    double lambda = 0.0;
};

/// Runs n_traj independent trajectories from the deterministic periodic
/// point alpha = beta = sqrt(n0(t_start)), t_start = t_grid.front() -
/// relaxation, and accumulates moments on t_grid. Trajectory i draws from
/// GaussianStream(seed, i).
[[nodiscard]] EnsembleMoments simulate_ensemble(const ModelParams& p, std::size_t n_traj,
                                                std::span<const double> t_grid, std::uint64_t seed,
                                                const PositivePOptions& opts = {});

struct ResidualReport {
    std::vector<double> t_mid;
    /// residual / standard error, one entry per interval, for each equation
    std::vector<double> z_n_plus;
    std::vector<double> z_R;
    std::vector<double> z_Z;
    double max_abs_z = 0.0;
    bool pass = false;
};

/// Checks the closed moment hierarchy for n_plus, R and Z against the
/// ensemble: every interval residual must lie within `sigmas` standard errors.
[[nodiscard]] ResidualReport check_moment_equations(const EnsembleMoments& moments, const ModelParams& p,
                                                    double sigmas = 3.0);

}  // namespace modopo
