#pragma once

#include <stdexcept>
#include <string>

namespace amemnet {

// Shape/dimension violations in numeric code.
struct DimensionError : std::runtime_error {
    explicit DimensionError(const std::string& what) : std::runtime_error(what) {}
};

// Bad configuration values (unknown keys, out-of-range fields).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Corrupt or malformed on-disk artifacts (datasets, archives, CSVs).
struct FormatError : std::runtime_error {
    explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

// Non-finite losses and other unrecoverable training failures.
struct TrainingError : std::runtime_error {
    explicit TrainingError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace amemnet
