#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dlab/bestapprox.hpp"
#include "dlab/constructions.hpp"
#include "dlab/normspace.hpp"
#include "dlab/transference.hpp"
#include "report.hpp"

namespace dlab::report {

// Norms: {"kind": "max", "dim": d} | {"kind": "p", "dim": d, "p": "3/2"} |
// {"kind": "wmax", "weights": [...]} |
// {"kind": "custom", "outer": "max"|"sum", "functionals": [[...]], "equiv": ["lo", "hi"]}
// default_dim applies when "dim" is absent.
NormDescriptor norm_from(const Json& j, size_t default_dim = 0);
Json norm_json(const NormDescriptor& norm);

// Entries: rational literal string, or {"quadratic": ["a", "b", "d"]} for a + b√d.
ExactReal real_from(const Json& j);

struct MatrixInput {
  RealMatrix omega;
  std::optional<RationalMatrix> rational;
  NormDescriptor norm1;
  NormDescriptor norm2;
  Json source;
};
// {"rows": [[...], ...], "norm1": {...}, "norm2": {...}}; norms default to max.
MatrixInput matrix_from(const Json& j);
MatrixInput load_matrix(const std::filesystem::path& path);

struct ConstructionState {
  std::string kind;  // "two-scale" | "prime-power" | "sign-varied"
  Json params;
  Json data;  // computed integers, warnings
  std::string digest;
  RealMatrix omega;  // m×2
  std::optional<TwoScaleVector> two_scale;
  std::optional<PrimePowerVector> prime_power;
  std::optional<SignVariedMatrix> sign_varied;

  Json to_json() const;  // {"kind", "params", "data", "digest"}
  std::vector<IntVector> candidates() const;
};

Json two_scale_params_json(const TwoScaleParams& p);
TwoScaleParams two_scale_params_from(const Json& j);
Json prime_power_params_json(const PrimePowerParams& p);
PrimePowerParams prime_power_params_from(const Json& j);

ConstructionState build_state(const std::string& kind, const Json& params);
// Rebuilds from the stored parameters; throws InvariantViolation when the
// rebuilt digest or data differs from the stored one.
ConstructionState state_from(const Json& j);
ConstructionState load_state(const std::filesystem::path& path);

}  // namespace dlab::report
