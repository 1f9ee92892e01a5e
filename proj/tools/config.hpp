#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "collapse/flow.hpp"

namespace collapse::cli {

/// Thrown for unreadable files, unknown keys, and out-of-range values.
/// Maps to exit code 2.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Flat key=value experiment description. '#' starts a comment; later
/// assignments win; --set overrides come last, then COLLAPSE_SEED.
struct ExperimentConfig {
  int classes = 4;
  int examples_per_class = 8;
  int feature_dim = 8;
  std::uint64_t seed = 42;
  double lambda = 0.0;
  FlowConfig flow;

  /// Optional prescribed initial SNR spectrum (C-1 values). Empty means
  /// "derive from the seeded Gaussian features".
  std::vector<double> omega0;

  // closedform grid
  double t_min = 1.0;
  double t_max = 1e7;
  int t_count = 15;

  // named tolerances
  double identity_tol = 1e-10;
  double max_rel_error = 1e-2;
  double drift_bound = 1e-3;
  double residual_tol = 1e-12;

  ProblemDims dims() const;
};

ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides);

}  // namespace collapse::cli
