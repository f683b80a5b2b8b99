#pragma once

#include <span>
#include <vector>

namespace modopo {

/// Periodic cubic spline through uniformly spaced samples y_j = y(j*T/N),
/// j = 0..N-1, with y(t + T) = y(t). Supports exact antiderivatives so that
/// integrals over arbitrary intervals (spanning any number of periods) are
/// available without quadrature.
class PeriodicSpline {
public:
    PeriodicSpline() = default;
    PeriodicSpline(double period, std::span<const double> samples);

    [[nodiscard]] double operator()(double t) const;

    /// Integral of the spline over [a, b]; b < a gives the negated value.
    [[nodiscard]] double integral(double a, double b) const;

    [[nodiscard]] double period() const noexcept { return period_; }
    [[nodiscard]] std::size_t size() const noexcept { return y_.size(); }
    [[nodiscard]] std::span<const double> samples() const noexcept { return y_; }

    /// Mean over one period (equals the trapezoid average of the samples).
    [[nodiscard]] double mean() const noexcept { return period_integral_ / period_; }

    /// max - min of the zero-mean antiderivative P(t) = int_0^t (y - mean),
    /// sampled densely over one period.
    [[nodiscard]] double antiderivative_oscillation() const;

private:
    // Antiderivative from 0 to t with t in [0, period).
    [[nodiscard]] double primitive_in_period(double t) const;

    double period_ = 0.0;
    double h_ = 0.0;
    std::vector<double> y_;
    std::vector<double> m_;       // second derivatives at the knots
    std::vector<double> prefix_;  // integral from 0 to knot j
    double period_integral_ = 0.0;
};

}  // namespace modopo
