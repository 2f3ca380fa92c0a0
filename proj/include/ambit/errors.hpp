#pragma once

#include <stdexcept>
#include <string>

namespace ambit {

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A point left the chart domain (or a field hit an excluded locus).
struct domain_error : error {
    using error::error;
};

// Malformed or inconsistent run configuration.
struct config_error : error {
    using error::error;
};

// Linear algebra breakdown: non-invertible metric, conditioning, eigenvalue
// clustering failure.
struct numeric_error : error {
    using error::error;
};

// A caller-supplied object violates a structural precondition (J^2 != -I,
// profile positivity, ...).
struct input_error : error {
    using error::error;
};

// The trichotomy classifier saw mutually inconsistent diagnostics.
struct classification_error : error {
    using error::error;
};

}  // namespace ambit
