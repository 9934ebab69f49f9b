#pragma once

#include <stdexcept>
#include <string>

namespace minnaert {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid input value (non-finite argument, point on the surface, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

// Evaluation at a singular point of a function (e.g. a Hankel function at zero).
class SingularityError : public DomainError {
public:
    using DomainError::DomainError;
};

class UnsupportedOrderError : public Error {
public:
    using Error::Error;
};

// Inconsistent or out-of-range configuration (resolution, parameters, dimension).
class ConfigError : public Error {
public:
    using Error::Error;
};

// Length or surface mismatch between a density and the surface it is applied on.
class ShapeError : public Error {
public:
    using Error::Error;
};

// Linear solve failure, ill-conditioning, degenerate geometry.
class NumericalError : public Error {
public:
    NumericalError(const std::string& what, double condition_estimate = 0.0)
        : Error(what), condition_(condition_estimate) {}
    double condition_estimate() const noexcept { return condition_; }

private:
    double condition_;
};

} // namespace minnaert
