#pragma once

#include <stdexcept>
#include <string>

namespace frachardy {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// The discretization is too coarse for the requested object.
class ResolutionError : public Error {
public:
    using Error::Error;
};

/// A pole, translated field or scaled support does not fit the box.
class GeometryError : public Error {
public:
    using Error::Error;
};

/// Malformed potential (coincident poles and similar).
class StructuralError : public Error {
public:
    using Error::Error;
};

/// A required precondition on an input object does not hold.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// Configuration file errors; carries the offending key or line.
class ParseError : public Error {
public:
    ParseError(const std::string& where, const std::string& what)
        : Error(where.empty() ? what : where + ": " + what), where_(where), detail_(what) {}

    const std::string& where() const noexcept { return where_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    std::string where_;
    std::string detail_;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// An iterative solver hit its iteration cap; carries the best estimate so far.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double best_value, double residual)
        : Error(what), best_value_(best_value), residual_(residual) {}

    double best_value() const noexcept { return best_value_; }
    double residual() const noexcept { return residual_; }

private:
    double best_value_;
    double residual_;
};

}  // namespace frachardy
