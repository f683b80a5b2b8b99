#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "generators.hpp"
#include "modopo/errors.hpp"
#include "modopo/periodic_spline.hpp"
#include "modopo/semiclassical.hpp"
#include "oracles.hpp"

using namespace modopo;

namespace {

ModelParams reference(double f1_over_fbar, double fbar_over_fth = 3.0)
{
    DimensionlessConfig c;
    c.fbar_over_fth = fbar_over_fth;
    c.f1_over_fbar = f1_over_fbar;
    return make_params(c);
}

std::vector<double> linspace(double a, double b, std::size_t n)
{
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) {
        g[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    return g;
}

}  // namespace

TEST_CASE("unmodulated run reaches the stationary photon number")
{
    const auto p = reference(0.0);
    const auto d = derive_params(p);
    const auto grid = linspace(0.0, 40.0, 41);
    const auto tr = integrate_n0(p, grid, p.gamma / d.lambda);
    // (fbar - f_th) / k = 2 gamma / lambda
    CHECK(tr.n0.back() == doctest::Approx(2.0 * p.gamma / d.lambda).epsilon(1e-6));
    CHECK(std::all_of(tr.n0.begin(), tr.n0.end(), [](double n) { return n > 0.0; }));
}

TEST_CASE("zero is a fixed point and below threshold decays")
{
    const auto grid = linspace(0.0, 10.0, 11);
    const auto z = integrate_n0(reference(1.2), grid, 0.0);
    CHECK(std::all_of(z.n0.begin(), z.n0.end(), [](double n) { return n == 0.0; }));

    const auto below = integrate_n0(reference(0.0, 0.5), grid, 1e6);
    // dn/dt = 2 n (eps - gamma) - ..., eps - gamma = -0.5: decay faster than exp(-t)
    CHECK(below.n0.back() < 1e6 * std::exp(-9.9));
    CHECK(below.n0.back() > 0.0);
    CHECK_THROWS_AS((void)integrate_n0(reference(0.0), grid, -1.0), InvalidParameter);
}

TEST_CASE("closed-form photon number")
{
    const auto p = reference(0.0);
    const auto d = derive_params(p);
    for (double t : {0.0, 0.7, 2.0}) {
        CHECK(asymptotic_n0(p, t) == doctest::Approx(2.0 * p.gamma / d.lambda).epsilon(1e-10));
    }
    CHECK_THROWS_AS((void)asymptotic_n0(reference(0.5, 0.8), 0.0), BelowThresholdError);
    CHECK_THROWS_AS((void)asymptotic_n0(reference(0.5, 1.0), 0.0), BelowThresholdError);
}

TEST_CASE("photon numbers at the reported minimum times")
{
    // n0 ~ 6.16e7 at t0 = 2.64 for f1 = 1.2 fbar, 1.71e8 at t0 = 2.51 for f1 = 0.4 fbar
    CHECK(asymptotic_n0(reference(1.2), 2.64) == doctest::Approx(6.16e7).epsilon(0.05));
    CHECK(asymptotic_n0(reference(0.4), 2.51) == doctest::Approx(1.71e8).epsilon(0.05));
}

TEST_CASE("closed form against an independent Simpson quadrature")
{
    gen::Source src(21);
    for (int trial = 0; trial < 5; ++trial) {
        const auto p = make_params(gen::above_threshold(src));
        const auto h = oracle::from_params(p);
        const double t = src.uniform(0.0, h.period());
        CHECK(1.0 / asymptotic_n0(p, t) == doctest::Approx(oracle::inv_n0_quadrature(h, t)).epsilon(1e-6));
    }
}

TEST_CASE("periodic orbit against an independent fixed-step integration")
{
    gen::Source src(22);
    for (int trial = 0; trial < 5; ++trial) {
        const auto p = make_params(gen::above_threshold(src));
        const auto d = derive_params(p);
        const auto orbit = periodic_steady_state(p);
        REQUIRE(orbit.converged_periodic);
        const PeriodicSpline s(d.period, orbit.n0);
        const auto h = oracle::from_params(p);
        for (double frac : {0.0, 0.3, 0.77}) {
            const double t = frac * d.period;
            CHECK(d.lambda * s(t) == doctest::Approx(oracle::lambda_n0(h, t)).epsilon(1e-6));
        }
    }
}

TEST_CASE("periodic orbit shape for moderate modulation")
{
    const auto p = reference(0.4);
    const auto orbit = periodic_steady_state(p);
    CHECK(orbit.converged_periodic);
    const auto [lo, hi] = std::minmax_element(orbit.n0.begin(), orbit.n0.end());
    CHECK(*hi / *lo > 1.0);
    CHECK(std::isfinite(*hi / *lo));

    // one more period from the returned point repeats the orbit
    const auto d = derive_params(p);
    const auto again = integrate_n0(p, orbit.t_grid, orbit.n0.front());
    const auto next = integrate_n0(p, std::vector<double>{0.0, d.period}, orbit.n0.front());
    CHECK(std::abs(next.n0.back() - orbit.n0.front()) <= 1e-8 * *hi * 10);
    for (std::size_t i = 0; i < orbit.n0.size(); i += 97) {
        CHECK(again.n0[i] == doctest::Approx(orbit.n0[i]).epsilon(1e-7));
    }

    const auto flat = periodic_steady_state(reference(0.0));
    const auto [flo, fhi] = std::minmax_element(flat.n0.begin(), flat.n0.end());
    CHECK(*fhi / *flo == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("property: time-translation covariance")
{
    gen::Source src(23);
    for (int trial = 0; trial < 5; ++trial) {
        auto c = gen::above_threshold(src);
        const auto p = make_params(c);
        const double s = src.uniform(0.0, 2.0);
        c.phi += c.delta_over_gamma * s;
        const auto q = make_params(c);
        for (double t : {0.2, 1.1, 2.5}) {
            CHECK(asymptotic_n0(q, t) == doctest::Approx(asymptotic_n0(p, t + s)).epsilon(1e-6));
        }
    }
}

TEST_CASE("property: photon number scales inversely with the nonlinearity")
{
    gen::Source src(24);
    for (int trial = 0; trial < 5; ++trial) {
        const auto c = gen::above_threshold(src);
        const double lam = src.log_uniform(1e-6, 1e-1);
        const double scale = src.log_uniform(0.1, 10.0);
        // lambda -> scale * lambda with the same eps(t): keep k fbar / gamma3 fixed
        const auto p = make_params_with_lambda(c, lam);
        auto q = p;
        q.k = p.k * std::sqrt(scale);
        q.gamma3 = p.gamma3;
        auto h = std::get<HarmonicModulation>(p.modulation);
        h.fbar /= std::sqrt(scale);
        h.f1 /= std::sqrt(scale);
        q.modulation = h;
        const double t = src.uniform(0.0, 3.0);
        CHECK(asymptotic_n0(q, t) == doctest::Approx(asymptotic_n0(p, t) / scale).epsilon(1e-9));
        const auto op = periodic_steady_state(p);
        const auto oq = periodic_steady_state(q);
        CHECK(oq.n0[5] == doctest::Approx(op.n0[5] / scale).epsilon(1e-6));
    }
}

TEST_CASE("zero trajectory and period grid")
{
    const auto p = reference(0.5, 0.5);
    const auto z = zero_trajectory(p, 16);
    CHECK(z.n0.size() == 16);
    CHECK(z.t_grid.back() == doctest::Approx(derive_params(p).period * 15.0 / 16.0));
    CHECK(std::all_of(z.n0.begin(), z.n0.end(), [](double n) { return n == 0.0; }));
}
