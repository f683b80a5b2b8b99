#include "modopo/qsd.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "modopo/errors.hpp"
#include "modopo/parallel.hpp"
#include "modopo/stats.hpp"

namespace modopo {
namespace {

using cplx = std::complex<double>;

std::size_t substeps(double span, double dt)
{
    if (span <= 0.0) {
        return 0;
    }
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(span / dt - 1e-9)));
}

/// out = A v for a row-major sparse A with real entries.
void apply(const SparseOp& A, const StateVector& v, StateVector& out)
{
    const auto* outer = A.outerIndexPtr();
    const auto* inner = A.innerIndexPtr();
    const double* val = A.valuePtr();
    for (Eigen::Index r = 0; r < A.outerSize(); ++r) {
        cplx acc = 0.0;
        for (auto k = outer[r]; k < outer[r + 1]; ++k) {
            acc += val[k] * v[inner[k]];
        }
        out[r] = acc;
    }
}

}  // namespace

OperatorSet build_operators(const ModelParams& p, std::size_t n_max, std::size_t max_dim)
{
    const DerivedParams d = derive_params(p);
    if (n_max < 2) {
        throw InvalidParameter("Fock cutoff n_max must be at least 2");
    }
    const std::size_t levels = n_max + 1;
    if (levels > max_dim / levels) {
        std::ostringstream os;
        os << "Fock space dimension (" << levels << ")^2 exceeds the budget of " << max_dim;
        throw DimensionOverflow(os.str());
    }

    OperatorSet ops;
    ops.n_max = n_max;
    ops.dim = levels * levels;
    ops.gamma = p.gamma;
    ops.lambda = d.lambda;
    const auto dim = static_cast<Eigen::Index>(ops.dim);
    auto index = [levels](std::size_t n1, std::size_t n2) { return static_cast<Eigen::Index>(n1 * levels + n2); };

    using Triplet = Eigen::Triplet<double>;
    std::vector<Triplet> t1, t2, tp;
    ops.n1_diag.resize(dim);
    ops.n2_diag.resize(dim);
    ops.tail_mask.resize(dim);
    for (std::size_t n1 = 0; n1 < levels; ++n1) {
        for (std::size_t n2 = 0; n2 < levels; ++n2) {
            const Eigen::Index col = index(n1, n2);
            if (n1 > 0) {
                t1.emplace_back(index(n1 - 1, n2), col, std::sqrt(static_cast<double>(n1)));
            }
            if (n2 > 0) {
                t2.emplace_back(index(n1, n2 - 1), col, std::sqrt(static_cast<double>(n2)));
            }
            if (n1 > 0 && n2 > 0) {
                tp.emplace_back(index(n1 - 1, n2 - 1), col, std::sqrt(static_cast<double>(n1 * n2)));
            }
            ops.n1_diag[col] = static_cast<double>(n1);
            ops.n2_diag[col] = static_cast<double>(n2);
            ops.tail_mask[col] = (n1 + 3 > n_max || n2 + 3 > n_max) ? 1.0 : 0.0;
        }
    }
    ops.a1.resize(dim, dim);
    ops.a2.resize(dim, dim);
    ops.pair.resize(dim, dim);
    ops.a1.setFromTriplets(t1.begin(), t1.end());
    ops.a2.setFromTriplets(t2.begin(), t2.end());
    ops.pair.setFromTriplets(tp.begin(), tp.end());
    ops.pair_dag = SparseOp(ops.pair.transpose());

    const double c12 = std::sqrt(2.0 * p.gamma);
    const double c3 = std::sqrt(2.0 * d.lambda);
    ops.channels = {SparseOp(c12 * ops.a1), SparseOp(c12 * ops.a2), SparseOp(c3 * ops.pair)};
    ops.loss_diag = 2.0 * p.gamma * (ops.n1_diag + ops.n2_diag) +
                    2.0 * d.lambda * ops.n1_diag.cwiseProduct(ops.n2_diag);
    return ops;
}

FockState vacuum_state(const OperatorSet& ops, double t)
{
    FockState psi;
    psi.amplitudes = StateVector::Zero(static_cast<Eigen::Index>(ops.dim));
    psi.amplitudes[0] = 1.0;
    psi.t = t;
    return psi;
}

double tail_population(const FockState& psi, const OperatorSet& ops)
{
    if (psi.amplitudes.size() != ops.tail_mask.size()) {
        throw DimensionMismatch("state and operator set dimensions differ");
    }
    double tail = 0.0;
    for (Eigen::Index i = 0; i < psi.amplitudes.size(); ++i) {
        if (ops.tail_mask[i] != 0.0) {
            tail += std::norm(psi.amplitudes[i]);
        }
    }
    return tail;
}

FockState qsd_step(const FockState& psi, const OperatorSet& ops, double eps_t, double dt, GaussianStream& rng,
                   double tail_bound)
{
    const StateVector& v = psi.amplitudes;
    const Eigen::Index n = v.size();
    if (n != static_cast<Eigen::Index>(ops.dim)) {
        throw DimensionMismatch("state and operator set dimensions differ");
    }

    // L1 v, L2 v, L3 v without the channel prefactors; pair_dag v for the Hamiltonian.
    StateVector a1v(n), a2v(n), pv(n), pdv(n);
    apply(ops.a1, v, a1v);
    apply(ops.a2, v, a2v);
    apply(ops.pair, v, pv);
    apply(ops.pair_dag, v, pdv);
    const double c12 = std::sqrt(2.0 * ops.gamma);
    const double c3 = std::sqrt(2.0 * ops.lambda);
    const StateVector* base[3] = {&a1v, &a2v, &pv};
    const double scale[3] = {c12, c12, c3};

    const double noise_scale = std::sqrt(0.5 * dt);
    cplx mean[3];
    cplx dxi[3];
    double mean_sq = 0.0;
    for (int j = 0; j < 3; ++j) {
        mean[j] = scale[j] * v.dot(*base[j]);
        mean_sq += std::norm(mean[j]);
        const double re = rng();
        const double im = rng();
        dxi[j] = noise_scale * cplx(re, im);
    }
    // coefficients of L_j v (without prefactor) and of v in the increment
    cplx coef[3];
    cplx vcoef = 1.0 - 0.5 * mean_sq * dt;
    for (int j = 0; j < 3; ++j) {
        coef[j] = scale[j] * (std::conj(mean[j]) * dt + dxi[j]);
        vcoef -= mean[j] * dxi[j];
    }

    StateVector next(n);
    double norm2 = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const cplx x = v[i] * (vcoef - 0.5 * dt * ops.loss_diag[i]) + eps_t * dt * (pdv[i] - pv[i]) +
                       coef[0] * a1v[i] + coef[1] * a2v[i] + coef[2] * pv[i];
        next[i] = x;
        norm2 += std::norm(x);
    }

    const double norm = std::sqrt(norm2);
    if (!std::isfinite(norm) || norm <= 0.0) {
        throw TrajectoryDiverged("state diffusion step produced a non-normalizable state");
    }
    next /= norm;
    FockState out{std::move(next), psi.t + dt};
    const double tail = tail_population(out, ops);
    if (tail > tail_bound) {
        std::ostringstream os;
        os << "Fock truncation n_max=" << ops.n_max << " holds population " << tail << " in its top levels at t="
           << out.t;
        throw TruncationHealthError(os.str());
    }
    return out;
}

std::complex<double> expectation(const FockState& psi, const SparseOp& op)
{
    if (op.rows() != psi.amplitudes.size() || op.cols() != psi.amplitudes.size()) {
        throw DimensionMismatch("operator and state dimensions differ");
    }
    return psi.amplitudes.dot(op * psi.amplitudes);
}

double state_variance(const FockState& psi, const OperatorSet& ops)
{
    const Eigen::VectorXd pop = psi.amplitudes.cwiseAbs2();
    const double n1 = pop.dot(ops.n1_diag);
    const double n2 = pop.dot(ops.n2_diag);
    return 1.0 + n1 + n2 - 2.0 * expectation(psi, ops.pair).real();
}

std::size_t default_n_max(const ModelParams& p)
{
    const DerivedParams d = derive_params(p);
    constexpr int samples = 4096;
    double peak = 0.0;
    for (int i = 0; i < samples; ++i) {
        const double t = d.period * i / samples;
        peak = std::max(peak, (effective_pump(p, t) - p.gamma) / d.lambda);
    }
    return static_cast<std::size_t>(std::ceil(4.0 * peak + 10.0));
}

namespace {

QsdEnsemble run_ensemble(const ModelParams& p, const OperatorSet& ops, std::size_t n_traj,
                         std::span<const double> t_grid, std::uint64_t seed, const QsdOptions& opts)
{
    const std::size_t G = t_grid.size();
    const double t_start = t_grid.front() - opts.relaxation;

    struct Block {
        std::vector<RunningStat> V, n1, n2;
        std::vector<double> tail;
        std::size_t discarded = 0;
    };
    const std::size_t n_blocks = (n_traj + opts.block_size - 1) / opts.block_size;
    std::vector<Block> blocks(n_blocks);

    parallel_for(n_blocks, opts.workers, [&](std::size_t b) {
        Block& block = blocks[b];
        block.V.assign(G, {});
        block.n1.assign(G, {});
        block.n2.assign(G, {});
        block.tail.assign(G, 0.0);
        std::vector<double> V(G), n1(G), n2(G), tail(G);
        const std::size_t first = b * opts.block_size;
        const std::size_t last = std::min(n_traj, first + opts.block_size);
        for (std::size_t j = first; j < last; ++j) {
            GaussianStream rng(seed, j);
            FockState psi = vacuum_state(ops, t_start);
            double t = t_start;
            try {
                for (std::size_t g = 0; g < G; ++g) {
                    const double span = t_grid[g] - t;
                    const std::size_t ns = substeps(span, opts.dt);
                    for (std::size_t k = 0; k < ns; ++k) {
                        const double h = span / static_cast<double>(ns);
                        psi = qsd_step(psi, ops, effective_pump(p, psi.t), h, rng, opts.tail_bound);
                    }
                    t = t_grid[g];
                    psi.t = t;
                    const Eigen::VectorXd pop = psi.amplitudes.cwiseAbs2();
                    n1[g] = pop.dot(ops.n1_diag);
                    n2[g] = pop.dot(ops.n2_diag);
                    V[g] = 1.0 + n1[g] + n2[g] - 2.0 * expectation(psi, ops.pair).real();
                    tail[g] = pop.dot(ops.tail_mask);
                }
            } catch (const TrajectoryDiverged&) {
                ++block.discarded;
                continue;
            }
            for (std::size_t g = 0; g < G; ++g) {
                block.V[g].add(V[g]);
                block.n1[g].add(n1[g]);
                block.n2[g].add(n2[g]);
                block.tail[g] = std::max(block.tail[g], tail[g]);
            }
        }
    });

    std::vector<RunningStat> V(G), n1(G), n2(G);
    QsdEnsemble out;
    out.tail_pop.assign(G, 0.0);
    for (const Block& block : blocks) {
        for (std::size_t g = 0; g < G; ++g) {
            V[g].merge(block.V[g]);
            n1[g].merge(block.n1[g]);
            n2[g].merge(block.n2[g]);
            out.tail_pop[g] = std::max(out.tail_pop[g], block.tail[g]);
        }
        out.discarded += block.discarded;
    }
    if (static_cast<double>(out.discarded) > opts.divergence_budget * static_cast<double>(n_traj)) {
        std::ostringstream os;
        os << out.discarded << " of " << n_traj << " state diffusion trajectories failed";
        throw DivergenceBudgetExceeded(os.str());
    }
    out.t_grid.assign(t_grid.begin(), t_grid.end());
    out.V_mean.resize(G);
    out.V_stderr.resize(G);
    out.n1_mean.resize(G);
    out.n2_mean.resize(G);
    out.n1_stderr.resize(G);
    out.n2_stderr.resize(G);
    for (std::size_t g = 0; g < G; ++g) {
        out.V_mean[g] = V[g].mean();
        out.V_stderr[g] = V[g].std_error();
        out.n1_mean[g] = n1[g].mean();
        out.n2_mean[g] = n2[g].mean();
        out.n1_stderr[g] = n1[g].std_error();
        out.n2_stderr[g] = n2[g].std_error();
    }
    out.n_traj = n_traj;
    out.n_max = ops.n_max;
    out.seed = seed;
    out.dt = opts.dt;
    return out;
}

}  // namespace

QsdEnsemble simulate_qsd_ensemble(const ModelParams& p, std::size_t n_max, std::size_t n_traj,
                                  std::span<const double> t_grid, std::uint64_t seed, const QsdOptions& opts)
{
    if (n_traj < 2) {
        throw InvalidParameter("state diffusion ensemble needs at least 2 trajectories");
    }
    if (t_grid.empty()) {
        throw InvalidParameter("time grid must not be empty");
    }
    for (std::size_t i = 1; i < t_grid.size(); ++i) {
        if (!(t_grid[i] > t_grid[i - 1])) {
            throw InvalidParameter("time grid must be strictly increasing");
        }
    }
    if (!(opts.dt > 0.0) || !(opts.relaxation >= 0.0) || opts.block_size == 0) {
        throw InvalidParameter("dt > 0, relaxation >= 0 and block_size > 0 are required");
    }

    const bool automatic = n_max == 0;
    std::size_t cutoff = automatic ? default_n_max(p) : n_max;
    for (std::size_t attempt = 0;; ++attempt) {
        const OperatorSet ops = build_operators(p, cutoff, opts.max_dim);
        try {
            return run_ensemble(p, ops, n_traj, t_grid, seed, opts);
        } catch (const TruncationHealthError&) {
            if (!automatic || attempt >= opts.max_retries) {
                throw;
            }
            cutoff += opts.n_max_step;
        }
    }
}

}  // namespace modopo
