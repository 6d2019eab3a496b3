#pragma once

#include <stdexcept>
#include <string>

namespace epa {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input file; carries the offending line when known.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class GraphError : public Error {
public:
    using Error::Error;
};

/// Addition of an existing link or deletion of a missing one.
class InvalidPerturbation : public Error {
public:
    using Error::Error;
};

/// The requested attack has no admissible gene (or budget) to work with.
class InfeasibleAttack : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace epa
