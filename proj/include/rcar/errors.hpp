#pragma once

#include <stdexcept>
#include <string>

namespace rcar {

// Error taxonomy shared across the library. The CLI maps these onto
// stable exit codes (parameter -> 2, data -> 3, numeric -> 4).
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid configuration or argument values (bad distribution parameters,
// S below the lower bound, malformed flags, ...).
struct parameter_error : error {
    using error::error;
};

// Problems with the input data itself (series too short, non-numeric
// column, non-positive values under a log transform, ...).
struct data_error : error {
    using error::error;
};

// Numerical failures (simulation overflow, root not bracketed, ...).
struct numeric_error : error {
    using error::error;
};

}  // namespace rcar
