#include "modopo/fluctuations.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <variant>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "modopo/errors.hpp"
#include "modopo/parallel.hpp"
#include "ode.hpp"

namespace modopo {
namespace {

using State = detail::OdeState<3>;  // {log n0, V, J}

// Right-hand side of the linearized variance equation with the memory
// integral carried as J.
struct VarianceSystem {
    const ModelParams* p;
    double lambda;
    bool zero;

    void operator()(const State& x, State& dxdt, double t) const
    {
        const double gamma = p->gamma;
        const double eps = effective_pump(*p, t);
        const double n = zero ? 0.0 : std::exp(x[0]);
        dxdt[0] = zero ? 0.0 : 2.0 * (eps - gamma - lambda * n);
        dxdt[1] = -2.0 * (gamma + eps + lambda * n) * x[1] + 2.0 * lambda * n + 2.0 * gamma + x[2];
        dxdt[2] = -4.0 * gamma * x[2] + 4.0 * gamma * lambda * n;
    }
};

bool all_zero(const std::vector<double>& v)
{
    return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b)
{
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        m = std::max(m, std::abs(a[i] - b[i]));
    }
    return m;
}

double max_abs(const std::vector<double>& a)
{
    double m = 0.0;
    for (double v : a) {
        m = std::max(m, std::abs(v));
    }
    return m;
}

}  // namespace

CriteriaReport classify_entanglement(double v_plus, double v_minus)
{
    if (!(v_plus > 0.0) || !(v_minus > 0.0)) {
        throw InvalidParameter("variances must be positive");
    }
    CriteriaReport r;
    r.sum = v_plus + v_minus;
    r.product = v_plus * v_minus;
    r.inseparable = r.sum < 2.0;
    r.product_inseparable = r.product < 1.0;
    r.epr = r.product < 0.25;
    return r;
}

VarianceTrajectory integrate_variance(const ModelParams& p, const SemiclassicalTrajectory& n0,
                                      const FluctuationOptions& opts)
{
    const DerivedParams d = derive_params(p);
    if (n0.t_grid.empty() || n0.t_grid.size() != n0.n0.size()) {
        throw InvalidParameter("photon-number trajectory is empty or inconsistent");
    }
    const bool zero = all_zero(n0.n0);
    if (!zero && !n0.converged_periodic) {
        throw InvalidParameter("variance integration needs a converged periodic photon number");
    }
    const double period = d.period;
    if (std::abs(n0.t_grid.front()) > 1e-12 * period || n0.t_grid.back() >= period) {
        throw InvalidParameter("photon-number grid must cover one period starting at t = 0");
    }

    const std::size_t n = n0.t_grid.size();
    std::vector<double> obs(n0.t_grid.begin() + 1, n0.t_grid.end());
    obs.push_back(period);

    const VarianceSystem sys{&p, d.lambda, zero};
    const detail::OdeTolerances tol{opts.semiclassical.rtol, opts.semiclassical.atol};
    State x{zero ? 0.0 : std::log(n0.n0.front()), 1.0, zero ? 0.0 : d.lambda * n0.n0.front()};

    VarianceTrajectory out;
    out.t_grid = n0.t_grid;
    out.theta_opt = optimal_quadrature_angle(p);
    std::vector<double> u(n), V(n), J(n);
    std::vector<double> prev_V, prev_J;
    for (int m = 1; m <= opts.max_periods; ++m) {
        u[0] = x[0];
        V[0] = x[1];
        J[0] = x[2];
        detail::integrate_observed<3>(sys, x, 0.0, obs, tol, [&](std::size_t i, double, const State& s) {
            if (i + 1 < n) {
                u[i + 1] = s[0];
                V[i + 1] = s[1];
                J[i + 1] = s[2];
            }
        });
        if (!prev_V.empty()) {
            const bool v_done = max_abs_diff(V, prev_V) <= opts.periodic_tol * std::max(1.0, max_abs(V));
            const bool j_done = max_abs_diff(J, prev_J) <= opts.periodic_tol * std::max(1.0, max_abs(J));
            if (v_done && j_done) {
                out.converged = true;
                out.periods_to_converge = m;
                break;
            }
        }
        prev_V = V;
        prev_J = J;
    }
    if (!out.converged) {
        std::ostringstream os;
        os << "variance did not become periodic within " << opts.max_periods << " periods";
        throw NoConvergence(os.str());
    }

    out.V = std::move(V);
    out.J = std::move(J);
    out.n0_ref.t_grid = out.t_grid;
    out.n0_ref.n0.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.n0_ref.n0[i] = zero ? 0.0 : std::exp(u[i]);
    }
    out.n0_ref.converged_periodic = true;
    out.n0_ref.periods_to_converge = n0.periods_to_converge;
    return out;
}

VarianceTrajectory periodic_variance(const ModelParams& p, const FluctuationOptions& opts)
{
    SemiclassicalOptions sc = opts.semiclassical;
    sc.samples_per_period = opts.n_scan;
    const Regime regime = regime_classify(p, sc.threshold_band);
    const SemiclassicalTrajectory n0 =
        regime == Regime::AboveThreshold ? periodic_steady_state(p, sc) : zero_trajectory(p, opts.n_scan);
    return integrate_variance(p, n0, opts);
}

AsymptoticVariance::AsymptoticVariance(const ModelParams& p, const FluctuationOptions& opts)
    : p_(p), d_(derive_params(p)), opts_(opts)
{
    const double gamma = p_.gamma;
    const double period = d_.period;
    zero_ = regime_classify(p_, opts_.semiclassical.threshold_band) != Regime::AboveThreshold;
    if (zero_) {
        decay_per_period_ = 2.0 * (gamma * period + effective_pump_integral(p_, 0.0, period));
        return;
    }
    const std::size_t m = std::max<std::size_t>(opts_.asymptotic_samples, 16);
    const std::vector<double> grid = period_grid(period, m);
    std::vector<double> n0(m);
    for (std::size_t j = 0; j < m; ++j) {
        n0[j] = asymptotic_n0(p_, grid[j], opts_.semiclassical);
    }
    n0_ = PeriodicSpline(period, n0);

    // int_{-inf}^t e^{4 gamma (tau - t)} n0(tau) dtau, folded onto [t - T, t].
    const double fold = 1.0 / -std::expm1(-4.0 * gamma * period);
    std::vector<double> memory(m);
    for (std::size_t j = 0; j < m; ++j) {
        const double t = grid[j];
        auto f = [&](double tau) { return std::exp(4.0 * gamma * (tau - t)) * n0_(tau); };
        memory[j] = fold * boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, t - period, t, 15,
                                                                                         opts_.quad_tol);
    }
    memory_ = PeriodicSpline(period, memory);
    decay_per_period_ =
        2.0 * (gamma * period + effective_pump_integral(p_, 0.0, period) + d_.lambda * n0_.integral(0.0, period));
}

double AsymptoticVariance::n0(double t) const { return zero_ ? 0.0 : n0_(t); }

double AsymptoticVariance::operator()(double t) const
{
    const double gamma = p_.gamma;
    const double lambda = d_.lambda;
    auto integrand = [&](double tau) {
        double phase = gamma * (t - tau) + effective_pump_integral(p_, tau, t);
        double source = gamma;
        if (!zero_) {
            phase += lambda * n0_.integral(tau, t);
            source += lambda * n0_(tau) + 2.0 * gamma * lambda * memory_(tau);
        }
        return std::exp(-2.0 * phase) * source;
    };
    const double integral = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        integrand, t - d_.period, t, 15, opts_.quad_tol);
    return 2.0 * integral / -std::expm1(-decay_per_period_);
}

double asymptotic_variance(const ModelParams& p, double t, const FluctuationOptions& opts)
{
    return AsymptoticVariance(p, opts)(t);
}

double linearization_validity(const ModelParams& p)
{
    const DerivedParams d = derive_params(p);
    const double distance = std::abs(period_average(p.modulation) / d.f_th - 1.0);
    if (distance == 0.0) {
        return 0.0;
    }
    const double delta = 2.0 * std::numbers::pi / d.period;
    const double log_ratio = std::log(distance) - std::log(d.lambda / p.gamma)
                             - 2.0 * (modulation_depth(p.modulation) / d.f_th) * (p.gamma / delta);
    return std::exp(log_ratio);
}

VminResult find_vmin(const ModelParams& p, const FluctuationOptions& opts)
{
    const DerivedParams d = derive_params(p);
    VminResult r;
    r.regime = regime_classify(p, opts.semiclassical.threshold_band);
    r.validity_ratio = linearization_validity(p);
    r.validity_ok = r.validity_ratio >= opts.validity_factor;

    const VarianceTrajectory vt = periodic_variance(p, opts);
    const std::size_t n = vt.V.size();
    const auto it = std::min_element(vt.V.begin(), vt.V.end());
    const auto imin = static_cast<std::size_t>(it - vt.V.begin());
    const double vmax = *std::max_element(vt.V.begin(), vt.V.end());

    if (vmax - *it <= 1e-9 * vmax) {
        r.v_min = *it;
        r.t0 = 0.0;
        r.n0_at_t0 = vt.n0_ref.n0.front();
        r.criteria = classify_entanglement(r.v_min, r.v_min);
        return r;
    }

    const double period = d.period;
    const double h = period / static_cast<double>(n);
    const bool zero = all_zero(vt.n0_ref.n0);
    const VarianceSystem sys{&p, d.lambda, zero};
    const detail::OdeTolerances tol{opts.semiclassical.rtol, opts.semiclassical.atol};

    // State at arbitrary time s, integrated from the grid node at or below s.
    auto state_at = [&](double s) {
        const auto j_raw = static_cast<long long>(std::floor(s / h));
        const auto node = static_cast<std::size_t>(((j_raw % static_cast<long long>(n)) + static_cast<long long>(n))
                                                    % static_cast<long long>(n));
        State x{zero ? 0.0 : std::log(vt.n0_ref.n0[node]), vt.V[node], vt.J[node]};
        const double start = static_cast<double>(j_raw) * h;
        if (s > start) {
            detail::integrate_to<3>(sys, x, start, s, tol);
        }
        return x;
    };

    const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = static_cast<double>(imin) * h - h;
    double b = static_cast<double>(imin) * h + h;
    double c = b - golden * (b - a);
    double e = a + golden * (b - a);
    double fc = state_at(c)[1];
    double fe = state_at(e)[1];
    const double tol_t = opts.time_tol_fraction * period;
    while (b - a > tol_t) {
        if (fc < fe) {
            b = e;
            e = c;
            fe = fc;
            c = b - golden * (b - a);
            fc = state_at(c)[1];
        } else {
            a = c;
            c = e;
            fc = fe;
            e = a + golden * (b - a);
            fe = state_at(e)[1];
        }
    }
    double s_best = 0.5 * (a + b);
    State best = state_at(s_best);
    if (*it < best[1]) {
        s_best = static_cast<double>(imin) * h;
        best = State{zero ? 0.0 : std::log(vt.n0_ref.n0[imin]), vt.V[imin], vt.J[imin]};
    }
    double t0 = std::fmod(s_best, period);
    if (t0 < 0.0) {
        t0 += period;
    }
    if (t0 >= period) {
        t0 = 0.0;
    }
    r.v_min = best[1];
    r.t0 = t0;
    r.n0_at_t0 = zero ? 0.0 : std::exp(best[0]);
    r.criteria = classify_entanglement(r.v_min, r.v_min);
    return r;
}

std::vector<SweepRow> sweep_vmin(const ModelParams& base, std::span<const double> fbar_grid,
                                 std::span<const double> f1_levels, const FluctuationOptions& opts, unsigned workers)
{
    if (!std::holds_alternative<HarmonicModulation>(base.modulation)) {
        throw InvalidParameter("sweep_vmin requires a harmonic modulation profile");
    }
    const DerivedParams d = derive_params(base);
    std::vector<SweepRow> rows(fbar_grid.size() * f1_levels.size());
    for (std::size_t l = 0; l < f1_levels.size(); ++l) {
        for (std::size_t i = 0; i < fbar_grid.size(); ++i) {
            SweepRow& row = rows[l * fbar_grid.size() + i];
            row.fbar_over_fth = fbar_grid[i];
            row.f1_over_fbar = f1_levels[l];
        }
    }
    parallel_for(rows.size(), workers, [&](std::size_t idx) {
        SweepRow& row = rows[idx];
        try {
            ModelParams p = base;
            auto h = std::get<HarmonicModulation>(base.modulation);
            h.fbar = row.fbar_over_fth * d.f_th;
            h.f1 = row.f1_over_fbar * h.fbar;
            p.modulation = h;
            row.result = find_vmin(p, opts);
            row.ok = true;
        } catch (const std::exception& ex) {
            row.ok = false;
            row.error = ex.what();
        }
    });
    return rows;
}

}  // namespace modopo
