#pragma once

#include <stdexcept>
#include <string>

namespace nhtp {

/// Malformed or inconsistent caller input (dimension mismatch, bad index set).
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Requested work exceeds a configured memory or enumeration cap.
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Algorithm parameters outside their admissible ranges.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Operation is not defined for the tensor order it was given.
class UnsupportedOrderError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// x0 = 0 is an exact stationary point for m >= 3; the solver cannot start there.
class DegenerateStartError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace nhtp
