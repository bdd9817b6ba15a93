#pragma once

#include <stdexcept>
#include <string>

namespace skid {

// Raised when the integrator produces a non-finite state. The environment
// converts it into a failure terminal instead of aborting the run.
struct PhysicsFault : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid or inconsistent configuration. Carries a human-readable location
// (JSON pointer or file:line) so the CLI can print a precise diagnostic.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace skid
