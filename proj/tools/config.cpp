#include "config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "collapse/errors.hpp"

namespace collapse::cli {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    size_t used = 0;
    const double parsed = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return parsed;
  } catch (const std::exception&) {
    throw ConfigError("config: bad numeric value for '" + key + "': '" + value + "'");
  }
}

int parse_int(const std::string& key, const std::string& value) {
  const double v = parse_double(key, value);
  const int i = static_cast<int>(v);
  if (static_cast<double>(i) != v) {
    throw ConfigError("config: '" + key + "' must be an integer, got '" + value + "'");
  }
  return i;
}

std::vector<double> parse_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  std::istringstream stream(value);
  std::string cell;
  while (std::getline(stream, cell, ',')) out.push_back(parse_double(key, trim(cell)));
  return out;
}

void apply(ExperimentConfig& config, const std::string& key, const std::string& value) {
  if (key == "classes") {
    config.classes = parse_int(key, value);
  } else if (key == "examples_per_class") {
    config.examples_per_class = parse_int(key, value);
  } else if (key == "feature_dim") {
    config.feature_dim = parse_int(key, value);
  } else if (key == "seed") {
    config.seed = static_cast<std::uint64_t>(parse_double(key, value));
  } else if (key == "lambda") {
    config.lambda = parse_double(key, value);
  } else if (key == "step_size") {
    config.flow.step_size = parse_double(key, value);
  } else if (key == "horizon") {
    config.flow.horizon = parse_double(key, value);
  } else if (key == "record_every") {
    config.flow.record_every = parse_int(key, value);
  } else if (key == "realign_every") {
    config.flow.realign_every = parse_int(key, value);
  } else if (key == "method") {
    if (value == "discrete_renorm") {
      config.flow.method = FlowMethod::discrete_renorm;
    } else if (value == "analytic_rows") {
      config.flow.method = FlowMethod::analytic_rows;
    } else {
      throw ConfigError("config: unknown method '" + value + "'");
    }
  } else if (key == "omega0") {
    config.omega0 = parse_list(key, value);
  } else if (key == "t_min") {
    config.t_min = parse_double(key, value);
  } else if (key == "t_max") {
    config.t_max = parse_double(key, value);
  } else if (key == "t_count") {
    config.t_count = parse_int(key, value);
  } else if (key == "identity_tol") {
    config.identity_tol = parse_double(key, value);
  } else if (key == "max_rel_error") {
    config.max_rel_error = parse_double(key, value);
  } else if (key == "drift_bound") {
    config.drift_bound = parse_double(key, value);
  } else if (key == "residual_tol") {
    config.residual_tol = parse_double(key, value);
  } else {
    throw ConfigError("config: unknown key '" + key + "'");
  }
}

void apply_line(ExperimentConfig& config, const std::string& raw, const std::string& where) {
  std::string line = raw;
  const auto comment = line.find('#');
  if (comment != std::string::npos) line.erase(comment);
  line = trim(line);
  if (line.empty()) return;
  const auto eq = line.find('=');
  if (eq == std::string::npos) {
    throw ConfigError("config: expected key=value in " + where + ", got '" + line + "'");
  }
  apply(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
}

void validate(const ExperimentConfig& config) {
  if (config.classes < 2) throw ConfigError("config: classes must be >= 2");
  if (config.examples_per_class < 1) {
    throw ConfigError("config: examples_per_class must be >= 1");
  }
  if (config.feature_dim < 1) throw ConfigError("config: feature_dim must be >= 1");
  if (config.lambda < 0.0) throw ConfigError("config: lambda must be >= 0");
  if (config.flow.step_size <= 0.0) throw ConfigError("config: step_size must be positive");
  if (config.flow.horizon < 0.0) throw ConfigError("config: horizon must be >= 0");
  if (config.flow.record_every < 1) throw ConfigError("config: record_every must be >= 1");
  if (config.flow.realign_every < 0) throw ConfigError("config: realign_every must be >= 0");
  for (double w : config.omega0) {
    if (w <= 0.0) throw ConfigError("config: omega0 entries must be positive");
  }
  if (config.t_min <= 0.0 || config.t_max < config.t_min || config.t_count < 2) {
    throw ConfigError("config: need 0 < t_min <= t_max and t_count >= 2");
  }
  for (double tol : {config.identity_tol, config.max_rel_error, config.drift_bound,
                     config.residual_tol}) {
    if (tol <= 0.0) throw ConfigError("config: tolerances must be positive");
  }
}

}  // namespace

ProblemDims ExperimentConfig::dims() const {
  return make_dims(classes, examples_per_class, feature_dim);
}

ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  ExperimentConfig config;
  std::ifstream in(path);
  if (!in.good()) throw ConfigError("config: cannot read '" + path + "'");
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    apply_line(config, line, path + ":" + std::to_string(lineno));
  }
  for (const std::string& pair : overrides) {
    apply_line(config, pair, "--set");
  }
  if (const char* env_seed = std::getenv("COLLAPSE_SEED")) {
    apply(config, "seed", env_seed);
  }
  validate(config);
  return config;
}

}  // namespace collapse::cli
