#pragma once

#include <stdexcept>
#include <string>

namespace dsinfer {

// Exception hierarchy. The CLI maps each class onto an exit code:
//   UsageError / DomainError -> 1, DegenerateError / NumericError -> 2,
//   ResourceError -> 3.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input: wrong dimensions, out-of-range indices, bad files.
class UsageError : public Error {
public:
    using Error::Error;
};

/// A distribution or special-function parameter outside its domain.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Conditioning on an event that never occurred in the sample.
class DegenerateError : public Error {
public:
    using Error::Error;
};

/// Internal numerical failure (e.g. an LP witness failing its re-check).
class NumericError : public Error {
public:
    using Error::Error;
};

/// A rejection loop exceeded its proposal cap.
class ResourceError : public Error {
public:
    ResourceError(const std::string& what, double acceptance_estimate)
        : Error(what), acceptance_estimate_(acceptance_estimate) {}

    double acceptance_estimate() const noexcept { return acceptance_estimate_; }

private:
    double acceptance_estimate_;
};

}  // namespace dsinfer
