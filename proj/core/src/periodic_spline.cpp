#include "modopo/periodic_spline.hpp"

#include <algorithm>
#include <cmath>

#include "modopo/errors.hpp"

namespace modopo {
namespace {

// Thomas algorithm for a tridiagonal system with constant off-diagonals 1.
std::vector<double> solve_tridiagonal(std::span<const double> diag, std::span<const double> rhs)
{
    const std::size_t n = diag.size();
    std::vector<double> c(n, 0.0);
    std::vector<double> x(n, 0.0);
    double beta = diag[0];
    x[0] = rhs[0] / beta;
    for (std::size_t i = 1; i < n; ++i) {
        c[i] = 1.0 / beta;
        beta = diag[i] - c[i];
        x[i] = (rhs[i] - x[i - 1]) / beta;
    }
    for (std::size_t i = n - 1; i-- > 0;) {
        x[i] -= c[i + 1] * x[i + 1];
    }
    return x;
}

// Solves M_{i-1} + 4 M_i + M_{i+1} = r_i with cyclic wrap (Sherman-Morrison).
std::vector<double> solve_cyclic(std::span<const double> rhs)
{
    const std::size_t n = rhs.size();
    const double gamma = -4.0;
    std::vector<double> diag(n, 4.0);
    diag.front() -= gamma;
    diag.back() -= 1.0 / gamma;

    std::vector<double> x = solve_tridiagonal(diag, rhs);
    std::vector<double> u(n, 0.0);
    u.front() = gamma;
    u.back() = 1.0;
    const std::vector<double> z = solve_tridiagonal(diag, u);

    const double fact = (x.front() + x.back() / gamma) / (1.0 + z.front() + z.back() / gamma);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] -= fact * z[i];
    }
    return x;
}

}  // namespace

PeriodicSpline::PeriodicSpline(double period, std::span<const double> samples)
    : period_(period), y_(samples.begin(), samples.end())
{
    if (!(period > 0.0) || !std::isfinite(period)) {
        throw InvalidParameter("PeriodicSpline: period must be positive and finite");
    }
    if (y_.size() < 3) {
        throw InvalidParameter("PeriodicSpline: need at least 3 samples");
    }
    for (double v : y_) {
        if (!std::isfinite(v)) {
            throw InvalidParameter("PeriodicSpline: samples must be finite");
        }
    }
    const std::size_t n = y_.size();
    h_ = period_ / static_cast<double>(n);

    std::vector<double> rhs(n);
    const double scale = 6.0 / (h_ * h_);
    for (std::size_t i = 0; i < n; ++i) {
        const double prev = y_[(i + n - 1) % n];
        const double next = y_[(i + 1) % n];
        rhs[i] = scale * (next - 2.0 * y_[i] + prev);
    }
    m_ = solve_cyclic(rhs);

    prefix_.assign(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = (i + 1) % n;
        const double seg = 0.5 * h_ * (y_[i] + y_[j]) - h_ * h_ * h_ / 24.0 * (m_[i] + m_[j]);
        prefix_[i + 1] = prefix_[i] + seg;
    }
    period_integral_ = prefix_[n];
}

double PeriodicSpline::operator()(double t) const
{
    const std::size_t n = y_.size();
    double tau = std::fmod(t, period_);
    if (tau < 0.0) {
        tau += period_;
    }
    auto i = static_cast<std::size_t>(tau / h_);
    if (i >= n) {
        i = n - 1;
    }
    const std::size_t j = (i + 1) % n;
    const double b = (tau - static_cast<double>(i) * h_) / h_;
    const double a = 1.0 - b;
    return a * y_[i] + b * y_[j] + ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[j]) * h_ * h_ / 6.0;
}

double PeriodicSpline::primitive_in_period(double tau) const
{
    const std::size_t n = y_.size();
    auto i = static_cast<std::size_t>(tau / h_);
    if (i >= n) {
        i = n - 1;
    }
    const std::size_t j = (i + 1) % n;
    const double b = (tau - static_cast<double>(i) * h_) / h_;
    const double a = 1.0 - b;
    const double int_a = b - 0.5 * b * b;
    const double int_b = 0.5 * b * b;
    const double int_a3 = 0.5 * a * a - 0.25 * a * a * a * a - 0.25;
    const double int_b3 = 0.25 * b * b * b * b - 0.5 * b * b;
    const double seg = h_ * (y_[i] * int_a + y_[j] * int_b)
                       + h_ * h_ * h_ / 6.0 * (m_[i] * int_a3 + m_[j] * int_b3);
    return prefix_[i] + seg;
}

double PeriodicSpline::integral(double a, double b) const
{
    auto primitive = [this](double t) {
        const double cycles = std::floor(t / period_);
        double tau = t - cycles * period_;
        if (tau >= period_) {
            tau = 0.0;
        }
        return cycles * period_integral_ + primitive_in_period(std::max(tau, 0.0));
    };
    return primitive(b) - primitive(a);
}

double PeriodicSpline::antiderivative_oscillation() const
{
    const std::size_t samples = 8 * y_.size();
    const double avg = mean();
    double lo = 0.0;
    double hi = 0.0;
    for (std::size_t s = 1; s < samples; ++s) {
        const double t = period_ * static_cast<double>(s) / static_cast<double>(samples);
        const double p = primitive_in_period(t) - avg * t;
        lo = std::min(lo, p);
        hi = std::max(hi, p);
    }
    return hi - lo;
}

}  // namespace modopo
