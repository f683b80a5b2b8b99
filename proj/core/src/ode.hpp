#pragma once

// Thin wrapper over Boost.Odeint's controlled Dormand-Prince 5(4) stepper that
// lands exactly on requested output times and reports step-size underflow.

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <sstream>

#include <boost/numeric/odeint.hpp>

#include "modopo/errors.hpp"

namespace modopo::detail {

struct OdeTolerances {
    double rtol = 1e-9;
    double atol = 1e-12;
    double initial_step = 1e-3;
    double min_step = 1e-13;
};

template <std::size_t N>
using OdeState = std::array<double, N>;

/// Advances x from t0 through every time in `times` (ascending, all >= t0),
/// calling obs(index, t, x) at each, and leaves x at times.back().
template <std::size_t N, class System, class Observer>
void integrate_observed(System&& sys, OdeState<N>& x, double t0, std::span<const double> times,
                        const OdeTolerances& tol, Observer&& obs)
{
    namespace odeint = boost::numeric::odeint;
    using State = OdeState<N>;
    auto stepper = odeint::make_controlled<odeint::runge_kutta_dopri5<State>>(tol.atol, tol.rtol);

    double t = t0;
    double dt = tol.initial_step;
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double target = times[i];
        while (target - t > 1e-14 * std::max(1.0, std::abs(target))) {
            const double remaining = target - t;
            const bool capped = dt >= remaining;
            double step = capped ? remaining : dt;
            const double before = dt;
            const auto result = stepper.try_step(sys, x, t, step);
            if (result == odeint::success) {
                dt = capped ? std::max(step, before) : step;
            } else {
                dt = step;
                if (dt < tol.min_step * std::max(1.0, std::abs(t))) {
                    std::ostringstream os;
                    os << "ODE step size underflow at t=" << t << " (dt=" << dt << ")";
                    throw IntegrationFailure(os.str());
                }
            }
            for (double v : x) {
                if (!std::isfinite(v)) {
                    std::ostringstream os;
                    os << "ODE state became non-finite at t=" << t;
                    throw IntegrationFailure(os.str());
                }
            }
        }
        t = target;
        obs(i, target, std::as_const(x));
    }
}

/// Advances x from t0 to t1 without intermediate output.
template <std::size_t N, class System>
void integrate_to(System&& sys, OdeState<N>& x, double t0, double t1, const OdeTolerances& tol)
{
    const std::array<double, 1> end{t1};
    integrate_observed<N>(std::forward<System>(sys), x, t0, std::span<const double>(end), tol,
                          [](std::size_t, double, const OdeState<N>&) {});
}

}  // namespace modopo::detail
