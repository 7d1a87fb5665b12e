#pragma once

#include <stdexcept>
#include <string>

namespace scm {

// Invalid user-supplied parameters, config files, or precondition violations.
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Numerical failure during evaluation (singular system, non-convergent quadrature).
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace scm
