#pragma once

#include <cmath>
#include <numbers>
#include <cstdint>
#include <random>

#include "modopo/model.hpp"

namespace gen {

class Source {
public:
    explicit Source(std::uint64_t seed) : eng_(seed) {}
    double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(eng_); }
    double log_uniform(double a, double b) { return std::exp(uniform(std::log(a), std::log(b))); }

private:
    std::mt19937_64 eng_;
};

/// Valid harmonic configuration safely above threshold.
inline modopo::DimensionlessConfig above_threshold(Source& s)
{
    modopo::DimensionlessConfig c;
    c.gamma3_over_gamma = s.uniform(10.0, 50.0);
    c.k_over_gamma = s.log_uniform(1e-5, 1e-2);
    c.fbar_over_fth = s.uniform(1.2, 4.0);
    c.f1_over_fbar = s.uniform(0.0, 1.5);
    c.delta_over_gamma = s.uniform(1.0, 5.0);
    c.phi = s.uniform(-std::numbers::pi, std::numbers::pi);
    c.phi_L = s.uniform(-std::numbers::pi, std::numbers::pi);
    c.phi_K = s.uniform(-std::numbers::pi, std::numbers::pi);
    return c;
}

/// Below threshold, any modulation depth.
inline modopo::DimensionlessConfig below_threshold(Source& s)
{
    modopo::DimensionlessConfig c = above_threshold(s);
    c.fbar_over_fth = s.uniform(0.05, 0.9);
    return c;
}

}  // namespace gen
