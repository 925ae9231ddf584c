#pragma once

#include <stdexcept>
#include <string>

namespace nigrid {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument was rejected: wrong dimension, bad range, malformed spec.
class InvalidInputError : public Error {
public:
    using Error::Error;
};

/// A construction-time invariant was violated (topology, system parameters).
class ConstructionError : public Error {
public:
    using Error::Error;
};

/// A check was requested that the system cannot support (e.g. no storage function).
class UnsupportedError : public Error {
public:
    using Error::Error;
};

/// A finite-difference check received too few samples.
class InsufficientDataError : public Error {
public:
    using Error::Error;
};

/// Integration produced a non-finite state.
class DivergenceError : public Error {
public:
    DivergenceError(const std::string& what, double first_bad_time)
        : Error(what), first_bad_time_(first_bad_time) {}

    double first_bad_time() const { return first_bad_time_; }

private:
    double first_bad_time_;
};

}  // namespace nigrid
