#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "generators.hpp"
#include "modopo/errors.hpp"
#include "modopo/model.hpp"

using namespace modopo;

namespace {

ModelParams harmonic(double gamma, double gamma3, double k, double fbar, double f1, double delta, double phi = 0.0)
{
    ModelParams p;
    p.gamma = gamma;
    p.gamma3 = gamma3;
    p.k = k;
    p.modulation = HarmonicModulation{fbar, f1, delta, phi};
    return p;
}

}  // namespace

TEST_CASE("derived constants for the figure parameters")
{
    const auto d = derive_params(harmonic(1.0, 25.0, 5e-4, 0.0, 0.0, 2.0));
    CHECK(d.lambda == doctest::Approx(1e-8).epsilon(1e-14));
    CHECK(d.f_th == doctest::Approx(5e4).epsilon(1e-14));
    CHECK(d.period == doctest::Approx(std::numbers::pi));

    const auto unit = derive_params(harmonic(1.0, 1.0, 1.0, 0.0, 0.0, 1.0));
    CHECK(unit.lambda == 1.0);
    CHECK(unit.f_th == 1.0);

    // eps_bar / gamma = fbar / f_th
    const auto p3 = harmonic(1.0, 25.0, 5e-4, 3.0 * 5e4, 0.0, 2.0);
    CHECK(derive_params(p3).eps_bar == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("invalid parameters are rejected")
{
    CHECK_THROWS_AS(validate(harmonic(0.0, 25.0, 1e-3, 1.0, 0.0, 1.0)), InvalidParameter);
    CHECK_THROWS_AS(validate(harmonic(1.0, -1.0, 1e-3, 1.0, 0.0, 1.0)), InvalidParameter);
    CHECK_THROWS_AS(validate(harmonic(1.0, 25.0, 0.0, 1.0, 0.0, 1.0)), InvalidParameter);
    CHECK_THROWS_AS(validate(harmonic(1.0, 25.0, 1e-3, 1.0, -0.1, 1.0)), InvalidParameter);
    CHECK_THROWS_AS(validate(harmonic(1.0, 25.0, 1e-3, 1.0, 0.1, 0.0)), InvalidParameter);
    CHECK_THROWS_AS((void)derive_params(harmonic(1.0, 25.0, 0.0, 1.0, 0.0, 1.0)), InvalidParameter);
    const std::vector<double> few(10, 1.0);
    CHECK_THROWS_AS(TabulatedModulation(1.0, few), InvalidParameter);
}

TEST_CASE("adiabatic-elimination warning")
{
    CHECK(warnings(harmonic(1.0, 25.0, 1e-3, 1.0, 0.0, 1.0)).empty());
    CHECK(warnings(harmonic(1.0, 5.0, 1e-3, 1.0, 0.0, 1.0)).size() == 1);
}

TEST_CASE("harmonic pump amplitude")
{
    const ModulationProfile flat = HarmonicModulation{150000.0, 0.0, 2.0, 0.0};
    CHECK(pump_amplitude(flat, 1.7) == 150000.0);
    const ModulationProfile m = HarmonicModulation{1.0, 0.5, 2.0, 0.0};
    CHECK(pump_amplitude(m, 0.0) == doctest::Approx(1.5));
    CHECK(pump_amplitude(m, std::numbers::pi / 2) == doctest::Approx(0.5));
    CHECK(period_average(ModulationProfile{HarmonicModulation{2.0, 5.0, 3.0, 0.0}}) == 2.0);
}

TEST_CASE("pump integral against composite Simpson")
{
    const ModulationProfile m = HarmonicModulation{1.3, 0.7, 2.5, 0.4};
    const double a = -1.1;
    const double b = 3.9;
    const int n = 2000;
    const double h = (b - a) / n;
    double s = pump_amplitude(m, a) + pump_amplitude(m, b);
    for (int i = 1; i < n; ++i) {
        s += (i % 2 ? 4.0 : 2.0) * pump_amplitude(m, a + i * h);
    }
    CHECK(pump_integral(m, a, b) == doctest::Approx(s * h / 3.0).epsilon(1e-12));
    CHECK(pump_integral(m, b, a) == doctest::Approx(-s * h / 3.0).epsilon(1e-12));
}

TEST_CASE("tabulated modulation")
{
    const double T = std::numbers::pi;
    const std::size_t N = 512;
    std::vector<double> flat(N, 7.0);
    std::vector<double> cosine(N);
    for (std::size_t j = 0; j < N; ++j) {
        cosine[j] = 1.0 + 0.5 * std::cos(2.0 * T * static_cast<double>(j) / N);
    }
    const ModulationProfile c = TabulatedModulation(T, flat);
    const ModulationProfile m = TabulatedModulation(T, cosine);
    CHECK(period_average(c) == doctest::Approx(7.0));
    CHECK(period_average(m) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(modulation_period(m) == T);
    for (double t : {0.1, 0.77, 2.9}) {
        CHECK(pump_amplitude(m, t) == doctest::Approx(1.0 + 0.5 * std::cos(2.0 * t)).epsilon(1e-6));
        CHECK(pump_amplitude(m, t + T) == doctest::Approx(pump_amplitude(m, t)).epsilon(1e-12));
    }
}

TEST_CASE("regime classification")
{
    DimensionlessConfig c;
    c.fbar_over_fth = 3.0;
    CHECK(regime_classify(make_params(c)) == Regime::AboveThreshold);
    c.fbar_over_fth = 0.5;
    CHECK(regime_classify(make_params(c)) == Regime::BelowThreshold);
    for (double off : {1e-12, -1e-12, 0.0}) {
        c.fbar_over_fth = 1.0 + off;
        CHECK(regime_classify(make_params(c)) == Regime::AtThreshold);
    }
    c.fbar_over_fth = 1.0 + 1e-6;
    CHECK(regime_classify(make_params(c)) == Regime::AboveThreshold);
    CHECK(std::string(to_string(Regime::AtThreshold)) == "at");
}

TEST_CASE("optimal quadrature angle")
{
    ModelParams p;
    p.phi_L = 0.3;
    p.phi_K = -1.1;
    CHECK(optimal_quadrature_angle(p) == doctest::Approx(0.8));
}

TEST_CASE("make_params_with_lambda sets the coupling")
{
    DimensionlessConfig c;
    const auto p = make_params_with_lambda(c, 0.01);
    CHECK(derive_params(p).lambda == doctest::Approx(0.01).epsilon(1e-14));
    CHECK_THROWS_AS((void)make_params_with_lambda(c, 0.0), InvalidParameter);
}

TEST_CASE("property: scale covariance of derived constants and regime")
{
    gen::Source src(11);
    for (int trial = 0; trial < 50; ++trial) {
        const double gamma = src.log_uniform(0.1, 10.0);
        const double gamma3 = gamma * src.uniform(10.0, 50.0);
        const double k = src.log_uniform(1e-5, 1e-1);
        const double f_th = gamma * gamma3 / k;
        const double fbar = f_th * src.uniform(0.1, 4.0);
        const double f1 = fbar * src.uniform(0.0, 2.0);
        const double delta = src.uniform(0.1, 10.0);
        const double c = src.log_uniform(0.01, 100.0);

        const auto p = harmonic(gamma, gamma3, k, fbar, f1, delta);
        const auto q = harmonic(c * gamma, c * gamma3, c * k, c * fbar, c * f1, c * delta);
        const auto dp = derive_params(p);
        const auto dq = derive_params(q);
        CHECK(dq.lambda == doctest::Approx(c * dp.lambda).epsilon(1e-12));
        CHECK(dq.f_th == doctest::Approx(c * dp.f_th).epsilon(1e-12));
        // rates scale by c once time is rescaled by 1/c
        const double t = src.uniform(0.0, 10.0);
        CHECK(effective_pump(q, t / c) == doctest::Approx(c * effective_pump(p, t)).epsilon(1e-12));
        CHECK(fbar / dp.f_th == doctest::Approx(c * fbar / dq.f_th).epsilon(1e-12));
        CHECK(dp.lambda / p.gamma == doctest::Approx(dq.lambda / q.gamma).epsilon(1e-12));
        CHECK(regime_classify(p) == regime_classify(q));
    }
}

TEST_CASE("property: harmonic pump is periodic")
{
    gen::Source src(12);
    for (int trial = 0; trial < 100; ++trial) {
        const ModulationProfile m =
            HarmonicModulation{src.uniform(0, 5), src.uniform(0, 5), src.uniform(0.1, 10), src.uniform(-3, 3)};
        const double T = modulation_period(m);
        const double t = src.uniform(-50, 50);
        CHECK(pump_amplitude(m, t + T) == doctest::Approx(pump_amplitude(m, t)).epsilon(1e-12));
    }
}
