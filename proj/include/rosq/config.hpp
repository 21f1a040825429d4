#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rosq/desim.hpp"

namespace rosq {

struct ModelSpec {
  std::string arrival_kind = "exponential";
  std::vector<double> arrival_params{1.0};
  std::string service_kind = "exponential";
  std::vector<double> service_params{2.0};
  Discipline discipline = Discipline::ROS;
  /// When set, the arrival law is rescaled to reach this load.
  std::optional<double> load;

  bool operator==(const ModelSpec&) const = default;
};

struct RunSpec {
  std::uint64_t customers = 100000;
  std::uint64_t warmup = 1000;
  std::uint64_t seed = 1;
  std::uint64_t replications = 1;

  bool operator==(const RunSpec&) const = default;
};

struct AnalysisSpec {
  std::vector<double> x_grid;
  std::vector<double> s_grid;
  std::vector<double> omega_grid;
  std::vector<double> rho_grid;
  std::vector<double> nu_grid;
  double confidence = 0.95;
  /// Sample compared by `asym`: wait, busy-period, residual-busy,
  /// residual-service.
  std::string quantity = "wait";
  std::uint64_t q = 1000;

  bool operator==(const AnalysisSpec&) const = default;
};

/// Flat key = value file with dotted keys, '#' comments, and
/// comma-separated lists:
///
///   model.service.kind = pareto
///   model.service.params = 1.5, 1
///   run.customers = 1000000
struct ExperimentConfig {
  ModelSpec model;
  RunSpec run;
  AnalysisSpec analysis;
  std::string output_dir = ".";

  bool operator==(const ExperimentConfig&) const = default;

  /// Validates distributions and stability; throws ConfigError or
  /// StabilityError.
  QueueModel build_model() const;

  std::string to_text() const;
  /// Unknown keys and malformed values raise ConfigError. The result is
  /// validated with build_model().
  static ExperimentConfig parse(const std::string& text);
  /// Throws ConfigError naming the path if the file cannot be read.
  static ExperimentConfig load(const std::string& path);
};

}  // namespace rosq
