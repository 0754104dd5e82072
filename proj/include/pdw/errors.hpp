#pragma once

#include <stdexcept>
#include <string>

namespace pdw {

// Numerical failures thrown by the solvers. Construction-time validation of
// user input uses std::invalid_argument instead; the CLI maps the two classes
// to different exit codes.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IntegratorFailure : NumericalError {
    using NumericalError::NumericalError;
};

struct QuadratureNotConverged : NumericalError {
    using NumericalError::NumericalError;
};

struct DeterminantMismatch : NumericalError {
    using NumericalError::NumericalError;
};

struct DegenerateMonodromy : NumericalError {
    using NumericalError::NumericalError;
};

struct EigenvectorDegenerate : NumericalError {
    using NumericalError::NumericalError;
};

struct FrameSingular : NumericalError {
    using NumericalError::NumericalError;
};

struct DenominatorSmall : NumericalError {
    using NumericalError::NumericalError;
};

struct NoiseDominated : NumericalError {
    using NumericalError::NumericalError;
};

struct SamplesOutsideI0 : NumericalError {
    using NumericalError::NumericalError;
};

struct SearchExhausted : NumericalError {
    using NumericalError::NumericalError;
};

struct SpectralRadiusViolation : NumericalError {
    using NumericalError::NumericalError;
};

struct InsufficientSamples : NumericalError {
    using NumericalError::NumericalError;
};

struct DegenerateDenominator : NumericalError {
    using NumericalError::NumericalError;
};

struct UnsupportedFamily : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Bad run configuration (file syntax, unknown keys, out-of-range values).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace pdw
