#pragma once

#include <stdexcept>
#include <string>

namespace specgraph {

// Base for every recoverable computation failure thrown by this library.
struct ComputationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// standing_wave
struct DegenerateProfile : ComputationError {
    using ComputationError::ComputationError;
};
struct NoZeroCrossing : ComputationError {
    using ComputationError::ComputationError;
};
struct NoPeriodicOrbit : ComputationError {
    using ComputationError::ComputationError;
};
struct TargetOutOfRange : ComputationError {
    using ComputationError::ComputationError;
};

// spectral
struct InterpolationOutOfRange : ComputationError {
    using ComputationError::ComputationError;
};
struct NotACrossing : ComputationError {
    using ComputationError::ComputationError;
};
struct MultiplicityAboveOne : ComputationError {
    using ComputationError::ComputationError;
};

// curves
struct SeedNotACrossing : ComputationError {
    using ComputationError::ComputationError;
};
struct CorrectorDiverged : ComputationError {
    CorrectorDiverged(const std::string& msg, double lam, double t)
        : ComputationError(msg), last_lambda(lam), last_t(t) {}
    double last_lambda;
    double last_t;
};
struct InsufficientPoints : ComputationError {
    using ComputationError::ComputationError;
};

// index / maslov
struct BothFormsVanish : ComputationError {
    using ComputationError::ComputationError;
};
struct NonRegularInteriorCrossing : ComputationError {
    using ComputationError::ComputationError;
};
struct DegenerateConcavity : ComputationError {
    using ComputationError::ComputationError;
};

// resolvent_lab
struct NearSpectrum : ComputationError {
    using ComputationError::ComputationError;
};
struct EigenvalueNotSimple : ComputationError {
    using ComputationError::ComputationError;
};
struct TauPairingZero : ComputationError {
    using ComputationError::ComputationError;
};

}  // namespace specgraph
