#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "modopo/model.hpp"
#include "modopo/periodic_spline.hpp"
#include "modopo/semiclassical.hpp"

namespace modopo {

struct FluctuationOptions {
    SemiclassicalOptions semiclassical{};
    /// Grid points per period for the periodic variance (and the minimum scan).
    std::size_t n_scan = 2048;
    /// Absolute period-to-period change of V (and of the memory term) that counts as converged.
    double periodic_tol = 1e-8;
    int max_periods = 10000;
    /// Golden-section refinement stops at this fraction of the period.
    double time_tol_fraction = 1e-6;
    /// Factor standing in for "much greater than" in the linearization validity condition.
    double validity_factor = 10.0;
    /// Samples per period used to tabulate the closed-form photon number.
    std::size_t asymptotic_samples = 2048;
    double quad_tol = 1e-12;
};

/// Entanglement criteria for the quadrature-combination variances
/// V+ = V(Y1 + Y2) and V- = V(X1 - X2), vacuum level 1.
struct CriteriaReport {
    double sum = 0.0;      ///< V+ + V-, inseparable when < 2
    double product = 0.0;  ///< V+ V-, inseparable when < 1, EPR-paradox grade when < 1/4
    bool inseparable = false;
    bool product_inseparable = false;
    bool epr = false;
};

[[nodiscard]] CriteriaReport classify_entanglement(double v_plus, double v_minus);

/// Moments of the two subharmonic modes. At the optimal quadrature angle
/// the two-mode variance is V = 1 + <R>.
struct MomentSet {
    double n_plus = 0.0;
    double R = 0.0;
    double Z = 0.0;
    [[nodiscard]] double variance() const noexcept { return 1.0 + R; }
};

struct VarianceTrajectory {
    std::vector<double> t_grid;
    std::vector<double> V;
    /// Memory term 4 gamma lambda int_{-inf}^t e^{4 gamma (tau - t)} n0(tau) dtau.
    std::vector<double> J;
    /// Photon number co-integrated with V on the same grid.
    SemiclassicalTrajectory n0_ref;
    double theta_opt = 0.0;
    bool converged = false;
    int periods_to_converge = 0;
};

/// Integrates the linearized variance equation together with log n0 and the
/// memory term, starting from the periodic point of `n0`, until V and J repeat
/// to periodic_tol. The grid is taken from `n0` (one period starting at 0).
[[nodiscard]] VarianceTrajectory integrate_variance(const ModelParams& p, const SemiclassicalTrajectory& n0,
                                                    const FluctuationOptions& opts = {});

/// Periodic V(t) from the appropriate semiclassical attractor: the periodic
/// orbit above threshold, n0 = 0 otherwise.
[[nodiscard]] VarianceTrajectory periodic_variance(const ModelParams& p, const FluctuationOptions& opts = {});

/// Closed-form periodic variance. n0 is tabulated from its quadrature
/// representation (zero unless above threshold) and the semi-infinite
/// history integrals are folded onto one period by summing the geometric
/// series of period-shifted contributions.
class AsymptoticVariance {
public:
    explicit AsymptoticVariance(const ModelParams& p, const FluctuationOptions& opts = {});

    [[nodiscard]] double operator()(double t) const;
    [[nodiscard]] double n0(double t) const;
    [[nodiscard]] bool zero_photon_branch() const noexcept { return zero_; }

private:
    ModelParams p_;
    DerivedParams d_;
    FluctuationOptions opts_;
    bool zero_ = true;
    PeriodicSpline n0_;
    PeriodicSpline memory_;
    double decay_per_period_ = 0.0;
};

[[nodiscard]] double asymptotic_variance(const ModelParams& p, double t, const FluctuationOptions& opts = {});

/// |fbar/f_th - 1| / [(lambda/gamma) exp(2 (f1/f_th)(gamma/delta))].
[[nodiscard]] double linearization_validity(const ModelParams& p);

struct VminResult {
    double v_min = 0.0;
    double t0 = 0.0;
    double n0_at_t0 = 0.0;
    CriteriaReport criteria{};
    Regime regime = Regime::BelowThreshold;
    double validity_ratio = 0.0;
    bool validity_ok = false;
};

[[nodiscard]] VminResult find_vmin(const ModelParams& p, const FluctuationOptions& opts = {});

struct SweepRow {
    double fbar_over_fth = 0.0;
    double f1_over_fbar = 0.0;
    bool ok = false;
    std::string error;
    VminResult result{};
};

/// Minimum variance over a grid of fbar/f_th values for each modulation level
/// f1/fbar. Rows are ordered by level, then by fbar; a failing cell records
/// its error and the sweep continues. `base` must use harmonic modulation.
[[nodiscard]] std::vector<SweepRow> sweep_vmin(const ModelParams& base, std::span<const double> fbar_grid,
                                               std::span<const double> f1_levels,
                                               const FluctuationOptions& opts = {}, unsigned workers = 1);

}  // namespace modopo
