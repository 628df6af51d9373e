#pragma once

#include <optional>
#include <string>

#include "fracop/core.hpp"

namespace fracop {

// JSON-configured entry points behind the C API and the CLI. Every driver
// resolves defaults into the configuration it receives and echoes the
// resolved object under "config" in its JSON output.

struct DriverOutput {
  std::string json;
  std::string csv;
  bool pass = true;
  std::optional<Field> field;
};

// check ∈ {size, hoelder, M-decay, opnorm, bmo, lemmas}
DriverOutput run_check(const std::string& check, const std::string& config_json);
// Reference integrals and the lemma samplers.
DriverOutput run_quad_selftest(const std::string& config_json);
// A(z1, z2) at one separation or along a δ sweep.
DriverOutput run_eval_kernel(const std::string& config_json);
// op ∈ {laps, riesz-pot, riesz-tr, pv-laps, LK, T}; "s" is the multiplier order
DriverOutput run_apply_op(const std::string& config_json, const Field& f);
// kind ∈ {gagliardo, bmo, weak_l1, lp}
DriverOutput run_seminorm(const std::string& config_json, const Field& f);
// Neumann solve. rhs == nullptr selects the manufactured problem unless the
// config sets "rhs_laps", in which case rhs holds f and g = (−Δ)^{s/2} f.
DriverOutput run_solve(const std::string& config_json, const Field* rhs);

}  // namespace fracop
