#include "modopo/semiclassical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "modopo/errors.hpp"
#include "ode.hpp"

namespace modopo {
namespace {

void check_grid(std::span<const double> t_grid)
{
    if (t_grid.empty()) {
        throw InvalidParameter("time grid must not be empty");
    }
    for (std::size_t i = 1; i < t_grid.size(); ++i) {
        if (!(t_grid[i] > t_grid[i - 1])) {
            throw InvalidParameter("time grid must be strictly increasing");
        }
    }
}

double log_add(double a, double b)
{
    if (a == -std::numeric_limits<double>::infinity()) {
        return b;
    }
    if (b == -std::numeric_limits<double>::infinity()) {
        return a;
    }
    const double hi = std::max(a, b);
    return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

}  // namespace

std::vector<double> period_grid(double period, std::size_t n)
{
    std::vector<double> t(n);
    for (std::size_t j = 0; j < n; ++j) {
        t[j] = period * static_cast<double>(j) / static_cast<double>(n);
    }
    return t;
}

SemiclassicalTrajectory integrate_n0(const ModelParams& p, std::span<const double> t_grid, double n0_init,
                                     const SemiclassicalOptions& opts)
{
    const DerivedParams d = derive_params(p);
    check_grid(t_grid);
    if (!(n0_init >= 0.0) || !std::isfinite(n0_init)) {
        throw InvalidParameter("n0_init must be finite and >= 0");
    }

    SemiclassicalTrajectory out;
    out.t_grid.assign(t_grid.begin(), t_grid.end());
    out.n0.assign(t_grid.size(), 0.0);
    if (n0_init == 0.0) {
        return out;
    }

    const double gamma = p.gamma;
    const double lambda = d.lambda;
    auto rhs = [&](const detail::OdeState<1>& x, detail::OdeState<1>& dxdt, double t) {
        dxdt[0] = 2.0 * (effective_pump(p, t) - gamma - lambda * std::exp(x[0]));
    };
    detail::OdeState<1> x{std::log(n0_init)};
    const detail::OdeTolerances tol{opts.rtol, opts.atol};
    detail::integrate_observed<1>(rhs, x, t_grid.front(), t_grid, tol,
                                  [&](std::size_t i, double, const detail::OdeState<1>& s) {
                                      out.n0[i] = std::exp(s[0]);
                                  });
    return out;
}

double asymptotic_n0(const ModelParams& p, double t, const SemiclassicalOptions& opts)
{
    const DerivedParams d = derive_params(p);
    if (regime_classify(p, opts.threshold_band) != Regime::AboveThreshold) {
        throw BelowThresholdError("asymptotic n0 requires a period-averaged pump above threshold");
    }
    const double gamma = p.gamma;
    const double rate = 2.0 * (d.eps_bar - gamma);
    const double osc = p.k / p.gamma3 * pump_oscillation(p.modulation);

    // Kernel exponent for s = -tau >= 0.
    auto exponent = [&](double s) { return -2.0 * effective_pump_integral(p, t - s, t) + 2.0 * gamma * s; };

    const double chunk = std::min(0.5 * d.period, 1.0 / rate);
    const double min_span = opts.tail_decay_times / rate;
    const double log_tail_rel = std::log(opts.tail_rel);

    double log_total = -std::numeric_limits<double>::infinity();
    double s_lo = 0.0;
    for (std::size_t c = 0; c < opts.max_chunks; ++c) {
        const double s_hi = s_lo + chunk;
        double ref = -std::numeric_limits<double>::infinity();
        for (int j = 0; j <= 16; ++j) {
            ref = std::max(ref, exponent(s_lo + chunk * j / 16.0));
        }
        auto integrand = [&](double s) { return std::exp(exponent(s) - ref); };
        double err = 0.0;
        const double piece = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
            integrand, s_lo, s_hi, 15, opts.quad_tol, &err);
        if (piece > 0.0) {
            log_total = log_add(log_total, ref + std::log(piece));
        }
        s_lo = s_hi;

        const double log_kernel_bound = -rate * s_lo + 2.0 * osc;
        const double log_tail_bound = log_kernel_bound - std::log(rate);
        if (s_lo >= min_span && log_kernel_bound < log_tail_rel + log_total
            && log_tail_bound < log_tail_rel + log_total) {
            return std::exp(-std::log(2.0 * d.lambda) - log_total);
        }
    }
    std::ostringstream os;
    os << "asymptotic n0 quadrature did not meet its tail bound within " << opts.max_chunks << " chunks";
    throw TruncationFailure(os.str());
}

SemiclassicalTrajectory zero_trajectory(const ModelParams& p, std::size_t samples_per_period)
{
    SemiclassicalTrajectory out;
    out.t_grid = period_grid(modulation_period(p.modulation), samples_per_period);
    out.n0.assign(samples_per_period, 0.0);
    out.converged_periodic = true;
    out.periods_to_converge = 0;
    return out;
}

SemiclassicalTrajectory periodic_steady_state(const ModelParams& p, const SemiclassicalOptions& opts)
{
    const DerivedParams d = derive_params(p);
    if (regime_classify(p, opts.threshold_band) != Regime::AboveThreshold) {
        throw BelowThresholdError("periodic steady state requires a period-averaged pump above threshold");
    }
    if (opts.samples_per_period < 2) {
        throw InvalidParameter("samples_per_period must be >= 2");
    }
    const double period = d.period;
    const double gamma = p.gamma;
    const double lambda = d.lambda;

    SemiclassicalTrajectory out;
    out.t_grid = period_grid(period, opts.samples_per_period);
    std::vector<double> obs_times(out.t_grid.begin() + 1, out.t_grid.end());
    obs_times.push_back(period);

    auto rhs = [&](const detail::OdeState<1>& x, detail::OdeState<1>& dxdt, double t) {
        dxdt[0] = 2.0 * (effective_pump(p, t) - gamma - lambda * std::exp(x[0]));
    };
    const detail::OdeTolerances tol{opts.rtol, opts.atol};

    detail::OdeState<1> x{std::log(gamma / lambda)};
    std::vector<double> current(opts.samples_per_period);
    std::vector<double> previous;
    for (int m = 1; m <= opts.max_periods; ++m) {
        current[0] = std::exp(x[0]);
        detail::integrate_observed<1>(rhs, x, 0.0, obs_times, tol,
                                      [&](std::size_t i, double, const detail::OdeState<1>& s) {
                                          if (i + 1 < current.size()) {
                                              current[i + 1] = std::exp(s[0]);
                                          }
                                      });
        if (!previous.empty()) {
            double diff = 0.0;
            double peak = 0.0;
            for (std::size_t j = 0; j < current.size(); ++j) {
                diff = std::max(diff, std::abs(current[j] - previous[j]));
                peak = std::max(peak, current[j]);
            }
            if (diff <= opts.periodic_tol * peak) {
                out.n0 = current;
                out.converged_periodic = true;
                out.periods_to_converge = m;
                break;
            }
        }
        previous = current;
    }
    if (!out.converged_periodic) {
        std::ostringstream os;
        os << "photon number did not become periodic within " << opts.max_periods << " periods";
        throw NoConvergence(os.str());
    }

    const std::size_t checks = std::min(opts.cross_check_points, out.n0.size());
    for (std::size_t c = 0; c < checks; ++c) {
        const std::size_t j = c * out.n0.size() / std::max<std::size_t>(checks, 1);
        const double reference = asymptotic_n0(p, out.t_grid[j], opts);
        const double rel = std::abs(out.n0[j] - reference) / reference;
        if (!(rel <= opts.cross_tol)) {
            std::ostringstream os;
            os << "periodic orbit and closed-form photon number disagree at t=" << out.t_grid[j]
               << ": " << out.n0[j] << " vs " << reference << " (rel " << rel << ")";
            throw CrossCheckFailure(os.str());
        }
    }
    return out;
}

}  // namespace modopo
