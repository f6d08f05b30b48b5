#pragma once

#include <stdexcept>
#include <string>

namespace ctd {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Argument outside the mathematical domain of an operation
/// (time outside the horizon, reversed integration bounds, ...).
class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error(what) {}
};

/// Malformed or invariant-violating input data. The message names the
/// offending field.
class SchemaError : public Error {
public:
    explicit SchemaError(const std::string& what) : Error(what) {}
};

/// Scenario cannot be transcribed (syntactically infeasible bounds,
/// too few intervals, ...).
class TranscriptionError : public Error {
public:
    explicit TranscriptionError(const std::string& what) : Error(what) {}
};

/// Gradient requested at a nondifferentiable point (|r| kink of an
/// absolute-ramp cost).
class NondifferentiableError : public Error {
public:
    explicit NondifferentiableError(const std::string& what) : Error(what) {}
};

/// Two internally redundant computations disagreed beyond tolerance.
class ConsistencyError : public Error {
public:
    explicit ConsistencyError(const std::string& what) : Error(what) {}
};

}  // namespace ctd
