#pragma once

#include <complex>
#include <sstream>
#include <stdexcept>
#include <string>

namespace qcharm {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument lies outside the mathematical domain of an operation (r >= 1, K < 1, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A documented precondition of a diagnostic is not met. Distinct from a failed check.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// Degenerate input: zero-length curve, all-zero weight, no usable point pairs.
class DegenerateError : public Error {
public:
    using Error::Error;
};

/// Geometric failure. Carries an arc-length location when one is meaningful
/// (nearest corner for an undefined tangent, first crossing for a self-intersection).
class GeometryError : public Error {
public:
    GeometryError(const std::string& what, double location)
        : Error(what), location_(location) {}
    explicit GeometryError(const std::string& what) : Error(what) {}

    double location() const noexcept { return location_; }

private:
    double location_ = 0.0;
};

/// Quadrature or series failed to reach the requested tolerance.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double achieved)
        : Error(what), achieved_(achieved) {}

    double achieved() const noexcept { return achieved_; }

private:
    double achieved_;
};

/// The map is not locally quasiconformal at `where` (f_z = 0 or |f_zbar| >= |f_z|).
class NotQuasiconformalError : public Error {
public:
    NotQuasiconformalError(const std::string& what, std::complex<double> where)
        : Error(what), where_(where) {}

    std::complex<double> where() const noexcept { return where_; }

private:
    std::complex<double> where_;
};

/// Boundary data is not a homeomorphism; [t_begin, t_end] is the offending parameter interval.
class NonMonotoneError : public Error {
public:
    NonMonotoneError(const std::string& what, double t_begin, double t_end)
        : Error(what), t_begin_(t_begin), t_end_(t_end) {}

    double t_begin() const noexcept { return t_begin_; }
    double t_end() const noexcept { return t_end_; }

private:
    double t_begin_;
    double t_end_;
};

/// File or format problem.
class IoError : public Error {
public:
    using Error::Error;
};

namespace detail {

template <typename... Args>
std::string concat(const Args&... args)
{
    std::ostringstream os;
    os.precision(12);
    (os << ... << args);
    return os.str();
}

} // namespace detail
} // namespace qcharm
