#pragma once

#include <stdexcept>
#include <string>

namespace focalspec {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Violated precondition or invalid parameter (bad depth, bad steepness, ...).
class ContractError : public Error {
public:
    using Error::Error;
};

/// Zero-sized grids or mismatched image shapes.
class DimensionError : public ContractError {
public:
    using ContractError::ContractError;
};

/// File could not be read, written or decoded.
class IoError : public Error {
public:
    using Error::Error;
};

class CalibrationError : public Error {
public:
    CalibrationError(const std::string& what, double decay_lo, double decay_hi)
        : Error(what), decay_lo_(decay_lo), decay_hi_(decay_hi) {}

    double decay_at_lower_bracket() const noexcept { return decay_lo_; }
    double decay_at_upper_bracket() const noexcept { return decay_hi_; }

private:
    double decay_lo_;
    double decay_hi_;
};

/// A non-finite value appeared during iterative reconstruction.
class DivergenceError : public Error {
public:
    DivergenceError(const std::string& what, int step) : Error(what), step_(step) {}
    int step() const noexcept { return step_; }

private:
    int step_;
};

}  // namespace focalspec
