#pragma once

#include <stdexcept>
#include <string>

namespace auxbound {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed data handed to an operation (non-finite entries, bad grid, ...).
class InvalidInputError : public Error {
public:
    using Error::Error;
};

/// Inconsistent or out-of-range configuration values.
class InvalidConfigError : public Error {
public:
    using Error::Error;
};

/// Numerical failure (solver non-convergence, step-size underflow, ...).
class NumericError : public Error {
public:
    using Error::Error;
};

/// A slow matrix lost eigenvalue simplicity somewhere on the grid.
/// Carries the offending time window so callers can route the interval
/// to the irregular-moment patch.
class NonSimpleEigenvaluesError : public NumericError {
public:
    NonSimpleEigenvaluesError(const std::string& msg, double t_begin, double t_end)
        : NumericError(msg), t_begin(t_begin), t_end(t_end) {}
    double t_begin;
    double t_end;
};

/// Eigenvalue matching between consecutive samples was ambiguous; the grid
/// needs refinement on the reported interval.
class RefineGridError : public NumericError {
public:
    RefineGridError(const std::string& msg, double t_begin, double t_end)
        : NumericError(msg), t_begin(t_begin), t_end(t_end) {}
    double t_begin;
    double t_end;
};

/// Integration step size underflowed; the problem is too stiff for the
/// explicit solver at the requested tolerance.
class StiffnessError : public NumericError {
public:
    StiffnessError(const std::string& msg, double t_at) : NumericError(msg), t_at(t_at) {}
    double t_at;
};

/// Both +d and -d probes of the irregular-moment patch hit non-simple
/// eigenvalues on the shifted interval.
class PatchFailureError : public NumericError {
public:
    using NumericError::NumericError;
};

/// Requested ellipsoid projection has a singular eliminated block.
class DegenerateProjectionError : public NumericError {
public:
    using NumericError::NumericError;
};

} // namespace auxbound
