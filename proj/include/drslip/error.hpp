#pragma once

#include <stdexcept>
#include <string>

namespace drslip {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid user input: bad parameter values, malformed config files.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Numerical failure of an otherwise valid computation.
class NumericError : public Error {
public:
    using Error::Error;
};

/// A resonant denominator in the Mathieu recurrence (|d| below 1e-14).
class DegenerateParameterError : public NumericError {
public:
    using NumericError::NumericError;
};

/// The two basis solutions are linearly dependent at the fitting instant.
class SingularBasisError : public NumericError {
public:
    using NumericError::NumericError;
};

/// The real-form series needs a real characteristic exponent.
class NonRealExponentError : public NumericError {
public:
    using NumericError::NumericError;
};

/// Adaptive integrator step fell below its floor.
class StepSizeUnderflowError : public NumericError {
public:
    using NumericError::NumericError;
};

/// The planner could not produce a feasible plan.
class InfeasiblePlanError : public Error {
public:
    using Error::Error;
};

}  // namespace drslip
