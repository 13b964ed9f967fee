#pragma once

#include <stdexcept>
#include <string>

namespace qrenew {

// Invalid argument to a numerical routine (negative rate, gamma outside [0,1], ...).
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Malformed or inconsistent experiment configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A numerical-quality guard tripped: too many truncated trajectories,
// convolution grid too coarse, and similar.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Internal invariant violated (e.g. a non-physical Bloch vector mid-trajectory).
class InvariantError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Non-fatal diagnostics go to stderr.
void warn(const std::string& message);

}  // namespace qrenew
