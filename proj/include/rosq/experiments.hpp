#pragma once

#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

#include "rosq/config.hpp"

namespace rosq {

/// Where and how a command runs. Tables are printed to `out` and also
/// written as CSV files under `out_dir`.
struct RunContext {
  std::string out_dir = ".";
  std::size_t jobs = 1;
  std::ostream* out = nullptr;
};

/// Per-customer CSV for the configured discipline and a summary row per
/// discipline (all three share the arrival and service paths).
void cmd_simulate(const ExperimentConfig& cfg, const RunContext& ctx);

/// ROS and FCFS waiting-time tails on shared paths, with the ratio and h.
void cmd_compare_tails(const ExperimentConfig& cfg, const RunContext& ctx);

/// h(rho, nu) over a grid. Empty grids default to 21 x 21 over [0, 1] x [1, 2];
/// the rho = 0 and rho = 1 rows use the limits 1 and Gamma(nu).
void cmd_h_table(const ExperimentConfig& cfg, const RunContext& ctx);

/// Waiting-time and busy-period transforms over analysis.s_grid.
void cmd_lst(const ExperimentConfig& cfg, const RunContext& ctx);

/// Scaled ROS waits against the heavy-traffic limits.
void cmd_heavytraffic(const ExperimentConfig& cfg, const RunContext& ctx);

/// Random versus deterministic arrival sums over analysis.x_grid.
void cmd_appendix_d(const ExperimentConfig& cfg, const RunContext& ctx);

/// Empirical tail of analysis.quantity against its asymptotic formula.
void cmd_asym(const ExperimentConfig& cfg, const RunContext& ctx);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Runs the property suite and prints one PASS/FAIL line per check.
/// Returns false if any check failed.
bool cmd_verify(const RunContext& ctx);

/// The property checks behind cmd_verify.
std::vector<CheckResult> run_property_checks(std::size_t jobs);

}  // namespace rosq
