#pragma once

#include <stdexcept>

namespace pinchflow {

/// Invalid mathematical input: non-finite values, out-of-range arguments,
/// violated preconditions of an operation.
struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Configuration parse or validation failure.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Persistence (file read/write, layout) failure.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace pinchflow
