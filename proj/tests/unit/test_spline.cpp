#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "modopo/errors.hpp"
#include "modopo/periodic_spline.hpp"

using modopo::PeriodicSpline;

namespace {

PeriodicSpline sampled(double T, std::size_t n, double (*f)(double))
{
    std::vector<double> y(n);
    for (std::size_t j = 0; j < n; ++j) {
        y[j] = f(T * static_cast<double>(j) / static_cast<double>(n));
    }
    return PeriodicSpline(T, y);
}

double wave(double t) { return 2.0 + std::sin(t) + 0.3 * std::cos(3.0 * t); }
double wave_int(double a, double b)
{
    return 2.0 * (b - a) - (std::cos(b) - std::cos(a)) + 0.1 * (std::sin(3.0 * b) - std::sin(3.0 * a));
}

}  // namespace

TEST_CASE("interpolates a smooth periodic function")
{
    const double T = 2.0 * std::numbers::pi;
    const auto s = sampled(T, 256, wave);
    for (double t : {0.0, 0.123, 1.0, 3.3, 6.2, -2.5, 40.0}) {
        CHECK(s(t) == doctest::Approx(wave(t)).epsilon(1e-7));
    }
    CHECK(s.mean() == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("exact integrals across many periods")
{
    const double T = 2.0 * std::numbers::pi;
    const auto s = sampled(T, 256, wave);
    for (auto [a, b] : {std::pair{0.0, 1.0}, {-3.0, 17.5}, {5.0, -40.0}, {2.0, 2.0}}) {
        CHECK(s.integral(a, b) == doctest::Approx(wave_int(a, b)).epsilon(1e-8));
    }
    // additivity
    CHECK(s.integral(-1.0, 3.0) + s.integral(3.0, 11.0) == doctest::Approx(s.integral(-1.0, 11.0)).epsilon(1e-13));
}

TEST_CASE("antiderivative oscillation of a cosine")
{
    // zero-mean antiderivative of cos(t) is sin(t): max - min = 2
    const auto s = sampled(2.0 * std::numbers::pi, 512, [](double t) { return 1.0 + std::cos(t); });
    CHECK(s.antiderivative_oscillation() == doctest::Approx(2.0).epsilon(1e-5));
}

TEST_CASE("rejects degenerate input")
{
    const std::vector<double> two{1.0, 2.0};
    CHECK_THROWS((void)PeriodicSpline(1.0, two));
    const std::vector<double> ok(8, 1.0);
    CHECK_THROWS((void)PeriodicSpline(-1.0, ok));
}
