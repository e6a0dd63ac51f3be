#pragma once

#include <stdexcept>
#include <string>

namespace cascade {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConnectivityError : Error {
    using Error::Error;
};

struct InvalidEdgeError : Error {
    using Error::Error;
};

struct ParameterError : Error {
    using Error::Error;
};

struct NumericalError : Error {
    using Error::Error;
};

struct DegenerateGraphError : Error {
    using Error::Error;
};

struct StabilityError : Error {
    using Error::Error;
};

struct SingularConditioningError : Error {
    using Error::Error;
};

struct DegenerateError : Error {
    using Error::Error;
};

struct DegenerateUpdateError : Error {
    using Error::Error;
};

struct IndexError : Error {
    using Error::Error;
};

struct DivergenceError : Error {
    DivergenceError(const std::string& msg, long step, int trial)
        : Error(msg), step(step), trial(trial) {}
    long step;
    int trial;
};

struct InsufficientAcceptanceError : Error {
    InsufficientAcceptanceError(const std::string& msg, double acceptance_rate)
        : Error(msg), acceptance_rate(acceptance_rate) {}
    double acceptance_rate;
};

struct ConfigError : Error {
    using Error::Error;
};

}  // namespace cascade
