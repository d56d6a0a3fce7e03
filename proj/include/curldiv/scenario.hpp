#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "curldiv/errors.hpp"

namespace curldiv {

/// Malformed or inconsistent scenario configuration. The message carries a line/column
/// for parse errors and a JSON pointer for schema errors.
class ConfigError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// Reads a JSON config file; throws ConfigError with line and column on bad syntax.
nlohmann::json load_config(const std::string& path);

struct RunOptions {
  std::string out_dir;  // overrides output.dir when non-empty
  int threads = 1;
};

struct ScenarioSummary {
  std::string task;
  std::string inputs_digest;
  nlohmann::json metrics = nlohmann::json::object();
  bool pass = false;
  std::vector<std::string> outputs;
  std::string error;  // set when the run raised
  nlohmann::json to_json() const;
};

/// Runs one scenario and writes its outputs plus summary.json into the output directory.
/// Library errors propagate; the summary is written before rethrowing.
ScenarioSummary run_scenario(const nlohmann::json& config, const RunOptions& opts = {});

struct Preset {
  std::string name;
  std::string description;
  nlohmann::json config;
};
const std::vector<Preset>& presets();
const Preset* find_preset(const std::string& name);

}  // namespace curldiv
