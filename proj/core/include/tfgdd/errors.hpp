#pragma once

#include <stdexcept>
#include <string>

namespace tfgdd {

// Invalid configuration or arguments (bad grid shape, out-of-range parameter, ...).
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& msg) : std::invalid_argument(msg) {}
};

// File / stream problems (missing file, malformed container, unsupported format).
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failure (singular system without a fallback, non-finite result, ...).
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace tfgdd
