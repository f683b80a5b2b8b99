#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "modopo/model.hpp"
#include "modopo/philox.hpp"

namespace modopo {

using SparseOp = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using StateVector = Eigen::VectorXcd;

/// Truncated two-mode Fock space, basis index n1 * (n_max + 1) + n2.
struct OperatorSet {
    std::size_t n_max = 0;
    std::size_t dim = 0;
    double gamma = 0.0;
    double lambda = 0.0;
    SparseOp a1;
    SparseOp a2;
    SparseOp pair;      ///< a1 a2
    SparseOp pair_dag;  ///< a1^dagger a2^dagger
    /// Channels L1 = sqrt(2 gamma) a1, L2 = sqrt(2 gamma) a2, L3 = sqrt(2 lambda) a1 a2.
    std::vector<SparseOp> channels;
    /// sum_j L_j^dagger L_j, which is diagonal in the Fock basis.
    Eigen::VectorXd loss_diag;
    Eigen::VectorXd n1_diag;
    Eigen::VectorXd n2_diag;
    /// 1 on basis states with n1 > n_max - 3 or n2 > n_max - 3.
    Eigen::VectorXd tail_mask;
};

/// Default cap on the product-space dimension (about 1e6 amplitudes).
inline constexpr std::size_t kDefaultMaxDim = std::size_t{1} << 20;

[[nodiscard]] OperatorSet build_operators(const ModelParams& p, std::size_t n_max,
                                          std::size_t max_dim = kDefaultMaxDim);

struct FockState {
    StateVector amplitudes;
    double t = 0.0;
};

[[nodiscard]] FockState vacuum_state(const OperatorSet& ops, double t = 0.0);

/// Probability held in levels n_i > n_max - 3 of either mode.
[[nodiscard]] double tail_population(const FockState& psi, const OperatorSet& ops);

inline constexpr double kDefaultTailBound = 1e-6;

/// One renormalized Euler-Maruyama step of the Gisin-Percival state
/// diffusion equation at pump eps_t. Consumes six normal variates.
/// Throws TruncationHealthError when the tail population exceeds tail_bound.
[[nodiscard]] FockState qsd_step(const FockState& psi, const OperatorSet& ops, double eps_t, double dt,
                                 GaussianStream& rng, double tail_bound = kDefaultTailBound);

/// <psi|op|psi>; throws DimensionMismatch when sizes disagree.
[[nodiscard]] std::complex<double> expectation(const FockState& psi, const SparseOp& op);

/// Two-mode squeezed variance of a single state at the optimal angle.
[[nodiscard]] double state_variance(const FockState& psi, const OperatorSet& ops);

struct QsdOptions {
    double dt = 1e-3;
    double relaxation = 5.0;
    unsigned workers = 1;
    std::size_t block_size = 64;
    double tail_bound = kDefaultTailBound;
    std::size_t max_dim = kDefaultMaxDim;
    /// Cutoff growth per retry when the cutoff was chosen automatically.
    std::size_t n_max_step = 4;
    std::size_t max_retries = 8;
    double divergence_budget = 1e-3;
};

struct QsdEnsemble {
    std::vector<double> t_grid;
    std::vector<double> V_mean;
    std::vector<double> V_stderr;
    std::vector<double> n1_mean;
    std::vector<double> n2_mean;
    std::vector<double> n1_stderr;
    std::vector<double> n2_stderr;
    /// Largest tail population over all trajectories at each grid time.
    std::vector<double> tail_pop;
    std::size_t n_traj = 0;
    std::size_t discarded = 0;
    std::size_t n_max = 0;
    std::uint64_t seed = 0;
    double dt = 0.0;
};

/// Cutoff heuristic: ceil(4 max_t n_qs(t) + 10) with the quasi-static
/// classical photon number n_qs = max(0, (eps(t) - gamma) / lambda).
[[nodiscard]] std::size_t default_n_max(const ModelParams& p);

/// Trajectories start from vacuum at t_grid.front() - relaxation; trajectory
/// i draws from GaussianStream(seed, i). n_max = 0 selects the cutoff
/// automatically and grows it on truncation-health failures.
[[nodiscard]] QsdEnsemble simulate_qsd_ensemble(const ModelParams& p, std::size_t n_max, std::size_t n_traj,
                                                std::span<const double> t_grid, std::uint64_t seed,
                                                const QsdOptions& opts = {});

}  // namespace modopo
