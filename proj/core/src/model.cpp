#include "modopo/model.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "modopo/errors.hpp"

namespace modopo {
namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool finite_positive(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace

TabulatedModulation::TabulatedModulation(double period, std::span<const double> samples)
    : spline_([&] {
          if (samples.size() < kMinSamples) {
              std::ostringstream os;
              os << "tabulated modulation needs at least " << kMinSamples << " samples per period, got "
                 << samples.size();
              throw InvalidParameter(os.str());
          }
          return PeriodicSpline(period, samples);
      }())
{
}

const char* to_string(Regime r) noexcept
{
    switch (r) {
        case Regime::BelowThreshold: return "below";
        case Regime::AtThreshold: return "at";
        case Regime::AboveThreshold: return "above";
    }
    return "unknown";
}

void validate(const ModelParams& p)
{
    if (!finite_positive(p.gamma)) {
        throw InvalidParameter("gamma must be positive");
    }
    if (!finite_positive(p.gamma3)) {
        throw InvalidParameter("gamma3 must be positive");
    }
    if (!finite_positive(p.k)) {
        throw InvalidParameter("k must be positive");
    }
    if (!std::isfinite(p.phi_L) || !std::isfinite(p.phi_K)) {
        throw InvalidParameter("phases must be finite");
    }
    std::visit(overloaded{
                   [](const HarmonicModulation& h) {
                       if (!std::isfinite(h.fbar) || !std::isfinite(h.phi)) {
                           throw InvalidParameter("harmonic modulation: fbar and phi must be finite");
                       }
                       if (!std::isfinite(h.f1) || h.f1 < 0.0) {
                           throw InvalidParameter("harmonic modulation: f1 must be >= 0");
                       }
                       if (!finite_positive(h.delta)) {
                           throw InvalidParameter("harmonic modulation: delta must be positive");
                       }
                   },
                   [](const TabulatedModulation&) {},
               },
               p.modulation);
}

std::vector<std::string> warnings(const ModelParams& p, double min_gamma3_ratio)
{
    std::vector<std::string> out;
    if (p.gamma3 / p.gamma < min_gamma3_ratio) {
        std::ostringstream os;
        os << "gamma3/gamma = " << p.gamma3 / p.gamma << " < " << min_gamma3_ratio
           << ": pump-mode adiabatic elimination is questionable";
        out.push_back(os.str());
    }
    return out;
}

DerivedParams derive_params(const ModelParams& p)
{
    validate(p);
    DerivedParams d;
    d.lambda = p.k * p.k / p.gamma3;
    d.f_th = p.gamma * p.gamma3 / p.k;
    d.eps_bar = p.k * period_average(p.modulation) / p.gamma3;
    d.period = modulation_period(p.modulation);
    return d;
}

double pump_amplitude(const ModulationProfile& m, double t)
{
    return std::visit(overloaded{
                          [t](const HarmonicModulation& h) { return h.fbar + h.f1 * std::cos(h.delta * t + h.phi); },
                          [t](const TabulatedModulation& tab) { return tab.spline()(t); },
                      },
                      m);
}

double pump_integral(const ModulationProfile& m, double a, double b)
{
    return std::visit(overloaded{
                          [a, b](const HarmonicModulation& h) {
                              return h.fbar * (b - a)
                                     + h.f1 / h.delta * (std::sin(h.delta * b + h.phi) - std::sin(h.delta * a + h.phi));
                          },
                          [a, b](const TabulatedModulation& tab) { return tab.spline().integral(a, b); },
                      },
                      m);
}

double period_average(const ModulationProfile& m)
{
    return std::visit(overloaded{
                          [](const HarmonicModulation& h) { return h.fbar; },
                          [](const TabulatedModulation& tab) { return tab.spline().mean(); },
                      },
                      m);
}

double modulation_period(const ModulationProfile& m)
{
    return std::visit(overloaded{
                          [](const HarmonicModulation& h) { return 2.0 * std::numbers::pi / h.delta; },
                          [](const TabulatedModulation& tab) { return tab.period(); },
                      },
                      m);
}

double pump_oscillation(const ModulationProfile& m)
{
    return std::visit(overloaded{
                          [](const HarmonicModulation& h) { return 2.0 * h.f1 / h.delta; },
                          [](const TabulatedModulation& tab) {
                              // dense sampling can miss the true extrema by O(h^2); pad by 1%
                              return 1.01 * tab.spline().antiderivative_oscillation();
                          },
                      },
                      m);
}

double modulation_depth(const ModulationProfile& m)
{
    return std::visit(overloaded{
                          [](const HarmonicModulation& h) { return h.f1; },
                          [](const TabulatedModulation& tab) {
                              double hi = tab.spline().samples()[0];
                              for (double v : tab.spline().samples()) {
                                  hi = std::max(hi, v);
                              }
                              return hi - tab.spline().mean();
                          },
                      },
                      m);
}

double effective_pump(const ModelParams& p, double t) { return p.k * pump_amplitude(p.modulation, t) / p.gamma3; }

double effective_pump_integral(const ModelParams& p, double a, double b)
{
    return p.k * pump_integral(p.modulation, a, b) / p.gamma3;
}

Regime regime_classify(const ModelParams& p, double band)
{
    const DerivedParams d = derive_params(p);
    const double ratio = period_average(p.modulation) / d.f_th;
    if (std::abs(ratio - 1.0) < band) {
        return Regime::AtThreshold;
    }
    return ratio < 1.0 ? Regime::BelowThreshold : Regime::AboveThreshold;
}

double optimal_quadrature_angle(const ModelParams& p) noexcept { return -(p.phi_L + p.phi_K); }

ModelParams make_params(const DimensionlessConfig& c)
{
    ModelParams p;
    p.gamma = 1.0;
    p.gamma3 = c.gamma3_over_gamma;
    p.k = c.k_over_gamma;
    p.phi_L = c.phi_L;
    p.phi_K = c.phi_K;
    if (!finite_positive(p.gamma3) || !finite_positive(p.k)) {
        throw InvalidParameter("gamma3_over_gamma and k_over_gamma must be positive");
    }
    const double f_th = p.gamma * p.gamma3 / p.k;
    HarmonicModulation h;
    h.fbar = c.fbar_over_fth * f_th;
    h.f1 = c.f1_over_fbar * h.fbar;
    h.delta = c.delta_over_gamma;
    h.phi = c.phi;
    p.modulation = h;
    validate(p);
    return p;
}

ModelParams make_params_with_lambda(DimensionlessConfig c, double lambda_over_gamma)
{
    if (!finite_positive(lambda_over_gamma)) {
        throw InvalidParameter("lambda/gamma must be positive");
    }
    c.k_over_gamma = std::sqrt(lambda_over_gamma * c.gamma3_over_gamma);
    return make_params(c);
}

}  // namespace modopo
