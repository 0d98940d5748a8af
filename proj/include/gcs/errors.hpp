#pragma once

#include <stdexcept>

namespace gcs {

// A documented call contract was broken (e.g. recycle() passed a token that
// is not the argmax under the supplied state).
struct ContractViolation : std::logic_error {
  using std::logic_error::logic_error;
};

// Every candidate token is zeroed out in some ensemble input, so no valid
// output distribution exists.
struct DegenerateEnsemble : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Model state space too large to enumerate exactly.
struct EnumerationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed experiment config; message names the offending field.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace gcs
