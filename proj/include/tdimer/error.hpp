#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace tdimer {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad user input: invalid slope, out-of-range parameters, malformed files.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// The T-graph (or one of its faces) is degenerate at the given dual vertices.
class DegeneracyError : public Error {
public:
    DegeneracyError(const std::string& what, std::vector<std::pair<int, int>> where)
        : Error(what), vertices(std::move(where)) {}
    std::vector<std::pair<int, int>> vertices;
};

/// An operation needed data outside the computed window.
class WindowError : public Error {
public:
    using Error::Error;
};

/// A random walk touched the window boundary before its stopping rule fired.
class TruncationError : public Error {
public:
    TruncationError(const std::string& what, std::size_t steps) : Error(what), path_length(steps) {}
    std::size_t path_length;
};

/// Graph connectivity assumption violated (unreachable root, different components).
class ConnectivityError : public Error {
public:
    using Error::Error;
};

/// Linear solve failed or produced an unacceptable residual.
class NumericError : public Error {
public:
    NumericError(const std::string& what, double r) : Error(what), residual(r) {}
    double residual;
};

/// Domain construction could not resolve the requested boundary at this scale.
class ResolutionError : public Error {
public:
    using Error::Error;
};

/// The dual of a forest does not have the single end an operation requires.
class TopologyError : public Error {
public:
    using Error::Error;
};

/// Internal invariant violation (a bug, not bad input).
class InternalError : public Error {
public:
    using Error::Error;
};

}  // namespace tdimer
