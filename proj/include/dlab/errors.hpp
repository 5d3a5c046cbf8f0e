#pragma once

#include <stdexcept>
#include <string>

namespace dlab {

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct DimensionError : std::runtime_error {
    explicit DimensionError(const std::string& msg) : std::runtime_error(msg) {}
};

struct MixednessError : std::runtime_error {
    explicit MixednessError(const std::string& msg) : std::runtime_error(msg) {}
};

struct DegenerateSpinorError : std::runtime_error {
    explicit DegenerateSpinorError(const std::string& msg) : std::runtime_error(msg) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace dlab
