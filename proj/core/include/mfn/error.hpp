#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace mfn {

// Base for all errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A parameter violates its documented domain (non-positive width, rise <= fall, ...).
class ParameterError : public Error {
public:
    using Error::Error;
};

// Argument outside the mathematical domain of a mapping (log of a non-positive current).
class DomainError : public Error {
public:
    using Error::Error;
};

// Inputs that are individually valid but inconsistent with each other.
class InputError : public Error {
public:
    using Error::Error;
};

// Analysis window does not fit inside the trace.
class WindowError : public Error {
public:
    using Error::Error;
};

class IntegrationDiverged : public Error {
public:
    IntegrationDiverged(double time, const std::string& what)
        : Error(what), time_(time) {}

    // Simulated time (s) of the first non-finite state.
    double time() const noexcept { return time_; }

private:
    double time_;
};

// Malformed config or data file. `where` carries the line or field path.
class ParseError : public Error {
public:
    ParseError(std::string where, const std::string& what)
        : Error(where.empty() ? what : where + ": " + what), where_(std::move(where)) {}

    const std::string& where() const noexcept { return where_; }

private:
    std::string where_;
};

} // namespace mfn
