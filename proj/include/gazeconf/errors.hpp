#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace gazeconf {

/// Base class for all library errors. The CLI maps subclasses onto its
/// exit-code scheme (parse/validation -> 2, convergence -> 3).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input data (bad JSON/CSV/INI syntax, wrong field types).
/// Messages carry the offending file and line where known.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Structurally valid input that violates a semantic contract
/// (non-monotonic timestamps, overlapping AOIs, single-class datasets, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Filesystem failures (unreadable input, unwritable output path).
class IoError : public Error {
public:
    using Error::Error;
};

/// The SVM optimizer hit its iteration cap before reaching the requested
/// KKT tolerance. Carries best-so-far diagnostics.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& msg, std::int64_t iterations, double violation)
        : Error(msg), iterations(iterations), violation(violation) {}

    std::int64_t iterations = 0;
    double violation = 0.0;
};

} // namespace gazeconf
