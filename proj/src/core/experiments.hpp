#pragma once

#include <nlohmann/json.hpp>

#include <string>

namespace plateau::experiments {

using nlohmann::json;

enum class RunOutcome { Ok, VerdictFail };

struct RunResult {
  RunOutcome outcome = RunOutcome::Ok;
  json summary;
};

// Built-in defaults per subcommand; user config overrides these (the CLI
// layers its flag overrides on top before calling the runner).
json default_config(const std::string& subcommand);
json merged_config(const std::string& subcommand, const json& user);

// Each runner validates its merged config (seed is mandatory), writes its
// outputs plus an echo of the effective config into out_dir, and returns
// the verdict. Numeric divergence escapes as numeric_failure.
RunResult run_landscape(const json& config, const std::string& out_dir);
RunResult run_variance_scan(const json& config, const std::string& out_dir);
RunResult run_trajectory(const json& config, const std::string& out_dir);
RunResult run_invariance(const json& config, const std::string& out_dir);
RunResult run_reduction_check(const json& config, const std::string& out_dir);

void write_file(const std::string& path, const std::string& content);

}  // namespace plateau::experiments
