#pragma once

#include <stdexcept>
#include <string>

namespace modopo {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
public:
    using Error::Error;
};

/// Adaptive ODE stepping failed (step size underflow or repeated rejection).
class IntegrationFailure : public Error {
public:
    using Error::Error;
};

/// The periodic closed-form photon number only exists above threshold.
class BelowThresholdError : public Error {
public:
    using Error::Error;
};

/// A semi-infinite quadrature could not meet its tail bound.
class TruncationFailure : public Error {
public:
    using Error::Error;
};

class NoConvergence : public Error {
public:
    using Error::Error;
};

/// Two independent evaluation routes disagreed beyond tolerance.
class CrossCheckFailure : public Error {
public:
    using Error::Error;
};

/// Too many positive-P trajectories were discarded as diverged.
class DivergenceBudgetExceeded : public Error {
public:
    using Error::Error;
};

/// A single trajectory crossed the divergence guard.
class TrajectoryDiverged : public Error {
public:
    using Error::Error;
};

/// Fock-space truncation lost too much population to the top levels.
class TruncationHealthError : public Error {
public:
    using Error::Error;
};

class DimensionOverflow : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace modopo
