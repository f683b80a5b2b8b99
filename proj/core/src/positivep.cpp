#include "modopo/positivep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "modopo/errors.hpp"
#include "modopo/parallel.hpp"
#include "modopo/periodic_spline.hpp"
#include "modopo/stats.hpp"

namespace modopo {
namespace {

constexpr std::size_t kMoments = 8;
constexpr std::size_t kResiduals = 3;

struct Moments {
    cplx n1, n2, n_plus, R, Z, n_plus_sq, n_plus_R;
};

Moments moments_of(const PPState& s)
{
    Moments m;
    m.n1 = s.alpha1 * s.beta1;
    m.n2 = s.alpha2 * s.beta2;
    m.n_plus = m.n1 + m.n2;
    m.R = (s.alpha1 - s.beta2) * (s.beta1 - s.alpha2);
    const cplx diff = m.n1 - m.n2;
    m.Z = diff * diff + m.n_plus;
    m.n_plus_sq = m.n_plus * m.n_plus;
    m.n_plus_R = m.n_plus * m.R;
    return m;
}

// Ito drift of n_plus, R and Z (the closed moment equations, per trajectory).
struct MomentDrift {
    cplx n_plus, R, Z;
};

MomentDrift moment_drift(const Moments& m, double eps, double gamma, double lambda)
{
    MomentDrift d;
    d.n_plus = (2.0 * eps - 2.0 * gamma - lambda) * m.n_plus - lambda * m.n_plus_sq - 2.0 * eps * m.R + lambda * m.Z;
    d.R = -(2.0 * eps + 2.0 * gamma + lambda) * m.R - lambda * m.n_plus_R - 2.0 * eps + lambda * m.Z;
    d.Z = -4.0 * gamma * m.Z + 2.0 * gamma * m.n_plus;
    return d;
}

std::size_t substeps(double span, double dt)
{
    if (span <= 0.0) {
        return 0;
    }
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(span / dt - 1e-9)));
}

bool finite(const cplx& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

}  // namespace

NoiseIncrement sample_noise(const PPState& state, double eps_t, double lambda, double dt, GaussianStream& rng)
{
    const double sqdt = std::sqrt(dt);
    const cplx d_alpha = eps_t - lambda * state.alpha1 * state.alpha2;
    const cplx d_beta = eps_t - lambda * state.beta1 * state.beta2;
    const cplx s_alpha = std::sqrt(0.5 * d_alpha) * sqdt;
    const cplx s_beta = std::sqrt(0.5 * d_beta) * sqdt;
    const double eta1 = rng();
    const double eta2 = rng();
    const double eta3 = rng();
    const double eta4 = rng();
    NoiseIncrement w;
    w.dW_alpha1 = s_alpha * cplx(eta1, eta2);
    w.dW_alpha2 = s_alpha * cplx(eta1, -eta2);
    w.dW_beta1 = s_beta * cplx(eta3, eta4);
    w.dW_beta2 = s_beta * cplx(eta3, -eta4);
    return w;
}

StepContext::StepContext(const ModelParams& p, double divergence_factor, bool with_noise)
    : params(p), noise(with_noise)
{
    const DerivedParams d = derive_params(p);
    lambda = d.lambda;
    divergence_guard = divergence_factor * std::sqrt(p.gamma / d.lambda);
}

PPState step_trajectory(const PPState& s, const StepContext& ctx, double dt, GaussianStream& rng)
{
    const double gamma = ctx.params.gamma;
    const double lambda = ctx.lambda;
    const double eps = effective_pump(ctx.params, s.t);
    const NoiseIncrement w = ctx.noise ? sample_noise(s, eps, lambda, dt, rng) : NoiseIncrement{};

    const cplx g1 = gamma + lambda * s.alpha2 * s.beta2;
    const cplx g2 = gamma + lambda * s.alpha1 * s.beta1;
    PPState out;
    out.alpha1 = s.alpha1 + (-g1 * s.alpha1 + eps * s.beta2) * dt + w.dW_alpha1;
    out.beta1 = s.beta1 + (-g1 * s.beta1 + eps * s.alpha2) * dt + w.dW_beta1;
    out.alpha2 = s.alpha2 + (-g2 * s.alpha2 + eps * s.beta1) * dt + w.dW_alpha2;
    out.beta2 = s.beta2 + (-g2 * s.beta2 + eps * s.alpha1) * dt + w.dW_beta2;
    out.t = s.t + dt;

    const double guard = ctx.divergence_guard;
    for (const cplx& z : {out.alpha1, out.alpha2, out.beta1, out.beta2}) {
        if (!finite(z) || std::abs(z) > guard) {
            std::ostringstream os;
            os << "positive-P trajectory diverged at t=" << out.t;
            throw TrajectoryDiverged(os.str());
        }
    }
    return out;
}

EnsembleMoments simulate_ensemble(const ModelParams& p, std::size_t n_traj, std::span<const double> t_grid,
                                  std::uint64_t seed, const PositivePOptions& opts)
{
    const DerivedParams d = derive_params(p);
    if (n_traj < 2) {
        throw InvalidParameter("positive-P ensemble needs at least 2 trajectories");
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

    const double t_start = t_grid.front() - opts.relaxation;
    double n0_start = 0.0;
    if (regime_classify(p, opts.semiclassical.threshold_band) == Regime::AboveThreshold) {
        const SemiclassicalTrajectory orbit = periodic_steady_state(p, opts.semiclassical);
        n0_start = PeriodicSpline(d.period, orbit.n0)(t_start);
    }
    const double amp = std::sqrt(n0_start);

    const StepContext ctx(p, opts.divergence_factor, opts.noise);
    const double gamma = p.gamma;
    const double lambda = d.lambda;
    const std::size_t G = t_grid.size();
    const std::size_t slots = G * kMoments + (G - 1) * kResiduals;

    struct Block {
        std::vector<RunningStat> stats;
        std::size_t discarded = 0;
    };
    const std::size_t n_blocks = (n_traj + opts.block_size - 1) / opts.block_size;
    std::vector<Block> blocks(n_blocks);

    auto run_block = [&](std::size_t b) {
        Block& block = blocks[b];
        block.stats.assign(slots, RunningStat{});
        std::vector<double> buffer(slots);
        const std::size_t first = b * opts.block_size;
        const std::size_t last = std::min(n_traj, first + opts.block_size);
        for (std::size_t j = first; j < last; ++j) {
            GaussianStream rng(seed, j);
            PPState s{cplx(amp), cplx(amp), cplx(amp), cplx(amp), t_start};
            try {
                // relaxation window
                const std::size_t nr = substeps(t_grid.front() - t_start, opts.dt);
                for (std::size_t k = 0; k < nr; ++k) {
                    const double h = (t_grid.front() - t_start) / static_cast<double>(nr);
                    s = step_trajectory(s, ctx, h, rng);
                }
                s.t = t_grid.front();

                Moments prev = moments_of(s);
                auto record = [&](std::size_t g, const Moments& m) {
                    double* slot = buffer.data() + g * kMoments;
                    slot[0] = m.n_plus.real();
                    slot[1] = m.R.real();
                    slot[2] = m.Z.real();
                    slot[3] = 1.0 + m.R.real();
                    slot[4] = m.n_plus_sq.real();
                    slot[5] = m.n_plus_R.real();
                    slot[6] = m.n1.real();
                    slot[7] = m.n2.real();
                };
                record(0, prev);
                for (std::size_t g = 1; g < G; ++g) {
                    const double span = t_grid[g] - t_grid[g - 1];
                    const std::size_t ns = substeps(span, opts.dt);
                    const double h = span / static_cast<double>(ns);
                    MomentDrift integral{};
                    Moments cur = prev;
                    for (std::size_t k = 0; k < ns; ++k) {
                        const MomentDrift drift = moment_drift(cur, effective_pump(p, s.t), gamma, lambda);
                        integral.n_plus += drift.n_plus * h;
                        integral.R += drift.R * h;
                        integral.Z += drift.Z * h;
                        s = step_trajectory(s, ctx, h, rng);
                        cur = moments_of(s);
                    }
                    s.t = t_grid[g];
                    record(g, cur);
                    double* res = buffer.data() + G * kMoments + (g - 1) * kResiduals;
                    res[0] = ((cur.n_plus - prev.n_plus - integral.n_plus) / span).real();
                    res[1] = ((cur.R - prev.R - integral.R) / span).real();
                    res[2] = ((cur.Z - prev.Z - integral.Z) / span).real();
                    prev = cur;
                }
            } catch (const TrajectoryDiverged&) {
                ++block.discarded;
                continue;
            }
            for (std::size_t k = 0; k < slots; ++k) {
                block.stats[k].add(buffer[k]);
            }
        }
    };
    parallel_for(n_blocks, opts.workers, run_block);

    std::vector<RunningStat> total(slots);
    std::size_t discarded = 0;
    for (const Block& block : blocks) {
        for (std::size_t k = 0; k < slots; ++k) {
            total[k].merge(block.stats[k]);
        }
        discarded += block.discarded;
    }
    if (static_cast<double>(discarded) > opts.divergence_budget * static_cast<double>(n_traj)) {
        std::ostringstream os;
        os << discarded << " of " << n_traj << " positive-P trajectories diverged (budget "
           << opts.divergence_budget * 100.0 << "%)";
        throw DivergenceBudgetExceeded(os.str());
    }

    EnsembleMoments out;
    out.t_grid.assign(t_grid.begin(), t_grid.end());
    out.n_traj = n_traj;
    out.discarded = discarded;
    out.seed = seed;
    out.dt = opts.dt;
    out.gamma = gamma;
    out.lambda = lambda;
    auto stat = [&](std::size_t k) { return MomentStat{total[k].mean(), total[k].std_error()}; };
    std::vector<MomentStat>* fields[kMoments] = {&out.n_plus, &out.R, &out.Z, &out.V,
                                                 &out.n_plus_sq, &out.n_plus_R, &out.n1, &out.n2};
    for (std::size_t f = 0; f < kMoments; ++f) {
        fields[f]->resize(G);
        for (std::size_t g = 0; g < G; ++g) {
            (*fields[f])[g] = stat(g * kMoments + f);
        }
    }
    std::vector<MomentStat>* residuals[kResiduals] = {&out.residual_n_plus, &out.residual_R, &out.residual_Z};
    for (std::size_t r = 0; r < kResiduals; ++r) {
        residuals[r]->resize(G - 1);
        for (std::size_t g = 0; g + 1 < G; ++g) {
            (*residuals[r])[g] = stat(G * kMoments + g * kResiduals + r);
        }
    }
    return out;
}

ResidualReport check_moment_equations(const EnsembleMoments& m, const ModelParams& p, double sigmas)
{
    const DerivedParams d = derive_params(p);
    const auto close = [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b)); };
    if (!close(m.gamma, p.gamma) || !close(m.lambda, d.lambda)) {
        throw InvalidParameter("ensemble moments were produced with different model parameters");
    }
    const std::size_t intervals = m.residual_n_plus.size();
    if (m.t_grid.size() != intervals + 1 || m.residual_R.size() != intervals || m.residual_Z.size() != intervals) {
        throw InvalidParameter("ensemble moments lack residual data on the time grid");
    }

    auto z_of = [](const MomentStat& s) {
        if (s.std_error > 0.0) {
            return s.mean / s.std_error;
        }
        return std::abs(s.mean) <= 1e-12 ? 0.0 : std::numeric_limits<double>::infinity();
    };

    ResidualReport r;
    r.t_mid.resize(intervals);
    r.z_n_plus.resize(intervals);
    r.z_R.resize(intervals);
    r.z_Z.resize(intervals);
    for (std::size_t i = 0; i < intervals; ++i) {
        r.t_mid[i] = 0.5 * (m.t_grid[i] + m.t_grid[i + 1]);
        r.z_n_plus[i] = z_of(m.residual_n_plus[i]);
        r.z_R[i] = z_of(m.residual_R[i]);
        r.z_Z[i] = z_of(m.residual_Z[i]);
        r.max_abs_z = std::max({r.max_abs_z, std::abs(r.z_n_plus[i]), std::abs(r.z_R[i]), std::abs(r.z_Z[i])});
    }
    r.pass = r.max_abs_z <= sigmas;
    return r;
}

}  // namespace modopo
