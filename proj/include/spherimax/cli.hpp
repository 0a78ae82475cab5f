#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "spherimax/theorems.hpp"

namespace spherimax {

// Process exit codes; the only four the tool produces.
inline constexpr int kExitSuccess = 0;
inline constexpr int kExitError = 1;        // input, I/O, or solver errors
inline constexpr int kExitInfeasible = 2;   // feasibility gate beta/rho < delta fails
inline constexpr int kExitNotFound = 3;     // no multiplicity certificate at tolerance

/// Parsed run configuration. See README for the config file format
/// (line-oriented `key = value`, `#` comments, strict: unknown keys are
/// rejected).
struct RunConfig {
  std::string functional_name;
  std::map<std::string, double> params;
  int n = 0;
  double rho = 0.0;

  bool has_range = false;
  double r_lo = 0.0;
  double r_hi = 0.0;
  int r_count = 33;

  bool has_rho_tilde = false;
  double rho_tilde = 0.0;

  std::uint64_t seed = kDefaultSeed;
  Tolerances tolerances;
  std::string output_dir = ".";

  /// Instantiate the configured problem (resolves the functional by name).
  ProblemInstance instance() const;
};

/// Parse and validate a config file. Parse errors carry line and column;
/// validation errors name the offending key.
RunConfig load_config(const std::string& path);

/// Tabulate the eta curve: writes eta_curve.csv and eta_plot.svg into
/// output_dir. Returns kExitInfeasible when the feasibility gate fails,
/// kExitError when sampling failed, kExitSuccess otherwise.
int cmd_eta(const RunConfig& config);

/// Full verification pipeline: feasibility gate, curve, per-sample maximizer
/// chain, curve monotonicity, and the ball-maximum condition test; writes
/// report.json. Returns kExitSuccess iff every clause passed.
int cmd_verify(const RunConfig& config);

/// Build the multiplier map: writes phi_map.csv and phi_plot.svg.
/// Returns kExitSuccess iff the map certified strictly increasing.
int cmd_phi(const RunConfig& config);

/// Run the multiplicity detector at rho_tilde: writes multiplicity.json.
/// Returns kExitSuccess on a certified pair (or a radial manifold pair),
/// kExitNotFound when no certificate is attainable at tolerance.
int cmd_multiplicity(const RunConfig& config);

}  // namespace spherimax
