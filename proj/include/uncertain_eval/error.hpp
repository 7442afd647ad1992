#pragma once

#include <stdexcept>
#include <string>

namespace uncertain_eval {

// Bad user input: malformed files, invalid configuration, violated preconditions.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A quantity that cannot be computed from the data at hand (e.g. a pooled
// sigma with no multi-trial pairs).
class UnavailableError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace uncertain_eval
