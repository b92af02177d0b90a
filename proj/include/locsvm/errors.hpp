#pragma once

#include <stdexcept>
#include <string>

namespace locsvm {

/// Bad caller-supplied data: dimension mismatch, invalid label, out-of-range parameter.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Query point lies in no region of a partition.
class CoverageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An empirical estimate was requested from an empty probe set.
class InsufficientDataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace locsvm
