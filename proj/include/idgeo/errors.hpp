#pragma once

#include <stdexcept>
#include <string>

namespace idgeo {

/// Invalid input: bad dimensions, out-of-range parameters, malformed shapes.
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A computation produced a non-finite value.
class NumericError : public std::runtime_error {
public:
    NumericError(const std::string& what, long index = -1)
        : std::runtime_error(what), index_(index) {}

    /// Step or sample index at which the failure was detected, -1 if unknown.
    long index() const noexcept { return index_; }

private:
    long index_;
};

/// Decoder Jacobian lost full column rank at an evaluated point.
class RankDeficiencyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operation not defined for the given input (e.g. curvature for d != 2).
class UnsupportedError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Internal consistency check failed.
class DiagnosticError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed decoder or experiment document. `path()` names the offending field.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& path, const std::string& message)
        : std::runtime_error(path.empty() ? message : path + ": " + message), path_(path) {}

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

} // namespace idgeo
