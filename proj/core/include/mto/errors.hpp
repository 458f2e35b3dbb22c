#pragma once

#include <stdexcept>
#include <string>

namespace mto {

// Thrown when a pmf/kernel fails validation (mass, negativity, shape).
struct InvalidDistribution : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Thrown when a named axis is missing or duplicated in a joint tensor.
struct AxisError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Thrown on incompatible matrix/alphabet dimensions.
struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Thrown when an operation needs a channel property that does not hold
// (e.g. deterministic kernels, membership in the noisy regime).
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// Thrown on malformed run configuration (CLI flags, JSON schema, size caps).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace mto
