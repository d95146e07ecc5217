// errors.hpp — Exception taxonomy and warning records shared by all modules.
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace qdcav::err {

// Invalid or inconsistent inputs (bad model parameters, malformed config, ...).
struct InvalidConfig : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A numerical procedure failed to converge or left its reliable domain.
struct NumericsFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Requested operation is outside the supported parameter regime.
struct UnsupportedParams : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A query fell outside the resolvable range of a discretized object.
struct RangeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Hard violation of a physical validity condition (distinct from soft warnings).
struct ValidityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A truncated-Hilbert-space request exceeds the supported matrix sizes.
struct DimensionOverflow : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A time integration ended before reaching its asymptotic regime.
struct NonConvergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Non-fatal diagnostics accumulated during a computation.
struct Warning {
  std::string code;    // short machine-readable tag, e.g. "ValidityWarning"
  std::string detail;  // human-readable explanation
};

using WarningList = std::vector<Warning>;

}  // namespace qdcav::err
