#pragma once

#include <stdexcept>
#include <string>

namespace mobility {

/// Bad configuration: unknown columns, malformed polygons, mismatched
/// schema/model files. Maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Bad or degenerate data: absent classes, constant durations, diverging
/// training. Maps to CLI exit code 3.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace mobility
