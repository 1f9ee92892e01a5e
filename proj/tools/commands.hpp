#pragma once

#include <string>

#include "config.hpp"

namespace collapse::cli {

// Exit codes shared by every command.
inline constexpr int kOk = 0;
inline constexpr int kToleranceViolation = 1;
inline constexpr int kInvalidConfig = 2;
inline constexpr int kNumericalFailure = 3;

int cmd_decompose(const ExperimentConfig& config, const std::string& out_dir);
int cmd_flow(const ExperimentConfig& config, const std::string& out_dir);
int cmd_closedform(const ExperimentConfig& config, const std::string& out_dir);
int cmd_compare(const ExperimentConfig& config, const std::string& out_dir);

}  // namespace collapse::cli
