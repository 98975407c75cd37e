#pragma once
// Error taxonomy. The CLI maps these onto its exit codes: config -> 2,
// capacity -> 3; indeterminate verdicts are reported in results, not thrown.

#include <stdexcept>
#include <string>

namespace rwre {

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct QuantizationError : ConfigError {
    explicit QuantizationError(const std::string& what) : ConfigError(what) {}
};

struct CapacityError : std::runtime_error {
    explicit CapacityError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace rwre
