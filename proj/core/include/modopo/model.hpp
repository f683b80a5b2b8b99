#pragma once

#include <span>
#include <string>
#include <variant>
#include <vector>

#include "modopo/periodic_spline.hpp"

// Physical model of the nondegenerate parametric oscillator with an
// amplitude-modulated pump. Rates are expressed in units of the subharmonic
// damping rate gamma and time in units of 1/gamma when parameters come from the
// dimensionless configuration, but every formula keeps gamma explicit.

namespace modopo {

/// f(t) = fbar + f1 cos(delta t + phi).
struct HarmonicModulation {
    double fbar = 0.0;
    double f1 = 0.0;
    double delta = 1.0;
    double phi = 0.0;
};

/// Periodic pump amplitude given by uniform samples over one period,
/// interpolated with a periodic cubic spline.
class TabulatedModulation {
public:
    static constexpr std::size_t kMinSamples = 64;

    TabulatedModulation(double period, std::span<const double> samples);

    [[nodiscard]] double period() const noexcept { return spline_.period(); }
    [[nodiscard]] const PeriodicSpline& spline() const noexcept { return spline_; }

private:
    PeriodicSpline spline_;
};

using ModulationProfile = std::variant<HarmonicModulation, TabulatedModulation>;

struct ModelParams {
    double gamma = 1.0;   ///< subharmonic damping rate
    double gamma3 = 25.0; ///< pump-mode damping rate
    double k = 5e-4;      ///< down-conversion coupling
    ModulationProfile modulation = HarmonicModulation{};
    double phi_L = 0.0;   ///< pump phase
    double phi_K = 0.0;   ///< coupling phase
};

struct DerivedParams {
    double lambda = 0.0;  ///< k^2 / gamma3
    double f_th = 0.0;    ///< gamma gamma3 / k
    double eps_bar = 0.0; ///< k fbar / gamma3
    double period = 0.0;  ///< modulation period
};

enum class Regime { BelowThreshold, AtThreshold, AboveThreshold };

[[nodiscard]] const char* to_string(Regime r) noexcept;

/// Relative band |fbar/f_th - 1| < band classified as AtThreshold.
inline constexpr double kDefaultThresholdBand = 1e-9;
/// gamma3/gamma below this triggers an adiabatic-elimination warning.
inline constexpr double kDefaultAdiabaticRatio = 10.0;

/// Throws InvalidParameter when a hard invariant fails.
void validate(const ModelParams& p);

/// Soft diagnostics (currently the adiabatic-elimination regime check).
[[nodiscard]] std::vector<std::string> warnings(const ModelParams& p,
                                                double min_gamma3_ratio = kDefaultAdiabaticRatio);

[[nodiscard]] DerivedParams derive_params(const ModelParams& p);

[[nodiscard]] double pump_amplitude(const ModulationProfile& m, double t);

/// Exact integral of f over [a, b].
[[nodiscard]] double pump_integral(const ModulationProfile& m, double a, double b);

[[nodiscard]] double period_average(const ModulationProfile& m);

[[nodiscard]] double modulation_period(const ModulationProfile& m);

/// max - min of int_0^t (f - fbar) over one period.
[[nodiscard]] double pump_oscillation(const ModulationProfile& m);

/// Peak excursion of f above its period average (f1 for harmonic profiles).
[[nodiscard]] double modulation_depth(const ModulationProfile& m);

/// eps(t) = k f(t) / gamma3.
[[nodiscard]] double effective_pump(const ModelParams& p, double t);

/// int_a^b eps(t) dt.
[[nodiscard]] double effective_pump_integral(const ModelParams& p, double a, double b);

[[nodiscard]] Regime regime_classify(const ModelParams& p, double band = kDefaultThresholdBand);

/// Optimal quadrature-angle sum Theta_1 + Theta_2 minimising the variance.
[[nodiscard]] double optimal_quadrature_angle(const ModelParams& p) noexcept;

/// Dimensionless inputs, as they appear in configuration files.
struct DimensionlessConfig {
    double gamma3_over_gamma = 25.0;
    double k_over_gamma = 5e-4;
    double fbar_over_fth = 3.0;
    double f1_over_fbar = 0.0;
    double delta_over_gamma = 2.0;
    double phi = 0.0;
    double phi_L = 0.0;
    double phi_K = 0.0;
};

/// Builds harmonic-modulation parameters with gamma = 1.
[[nodiscard]] ModelParams make_params(const DimensionlessConfig& c);

/// Same as make_params but with the coupling chosen so that lambda/gamma = lambda_over_gamma.
[[nodiscard]] ModelParams make_params_with_lambda(DimensionlessConfig c, double lambda_over_gamma);

}  // namespace modopo
