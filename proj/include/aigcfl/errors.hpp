#pragma once

#include <stdexcept>
#include <string>

namespace aigcfl {

// Bad inputs: malformed parameter sets, violated type invariants, unusable configs.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical breakdown: non-convergent quadrature, violated model assumptions,
// degenerate optimization problems.
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace aigcfl
