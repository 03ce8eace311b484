// lab - batch experiment runner. Thin shell over the plateau C API:
// merges config sources (flags > config file > built-in defaults), invokes
// the matching runner, and maps outcomes to exit codes
// (0 ok, 1 usage, 2 verdict failure under --strict, 3 numeric divergence).

#include <plateau.h>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitVerdict = 2;
constexpr int kExitNumeric = 3;

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::optional<long long> seed;
  std::optional<int> workers;
  bool strict = false;
  std::vector<std::string> overrides;  // key.path=json_value
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "JSON config file");
  cmd->add_option("--out", args.out_dir, "output directory")->required();
  cmd->add_option("--seed", args.seed, "master seed (mandatory here or in the config)");
  cmd->add_option("--workers", args.workers, "worker threads (0 = hardware)");
  cmd->add_flag("--strict", args.strict, "exit 2 when a verdict fails");
  cmd->add_option("--set", args.overrides,
                  "override a config entry, e.g. --set grid.n=101 (value is JSON)");
}

json load_config(const CommonArgs& args) {
  json config = json::object();
  if (!args.config_path.empty()) {
    std::ifstream in(args.config_path);
    if (!in) throw CLI::ValidationError("--config", "cannot read " + args.config_path);
    std::ostringstream ss;
    ss << in.rdbuf();
    config = json::parse(ss.str());
  }
  for (const auto& kv : args.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      throw CLI::ValidationError("--set", "expected key=value, got '" + kv + "'");
    }
    std::string pointer = "/" + kv.substr(0, eq);
    for (auto& c : pointer) {
      if (c == '.') c = '/';
    }
    const std::string raw = kv.substr(eq + 1);
    json value;
    try {
      value = json::parse(raw);
    } catch (const json::exception&) {
      value = raw;  // bare strings are taken literally
    }
    config[json::json_pointer(pointer)] = value;
  }
  if (args.seed) config["seed"] = *args.seed;
  if (args.workers) config["workers"] = *args.workers;
  return config;
}

using RunFn = int (*)(const char*, const char*, int*);

int run(const char* name, RunFn fn, const CommonArgs& args) {
  json config;
  try {
    config = load_config(args);
  } catch (const json::exception& e) {
    std::fprintf(stderr, "lab %s: config error: %s\n", name, e.what());
    return kExitUsage;
  }

  int verdict = 1;
  const int rc = fn(config.dump().c_str(), args.out_dir.c_str(), &verdict);
  if (rc == PL_ERR_NUMERIC) {
    std::fprintf(stderr, "lab %s: numeric divergence: %s\n", name, pl_error_message());
    return kExitNumeric;
  }
  if (rc != PL_OK) {
    std::fprintf(stderr, "lab %s: %s\n", name, pl_error_message());
    return kExitUsage;
  }
  if (verdict == 0) {
    std::fprintf(stderr, "lab %s: verdict FAIL (details in %s/verdict.json)\n", name,
                 args.out_dir.c_str());
    return args.strict ? kExitVerdict : kExitOk;
  }
  std::printf("lab %s: ok (outputs in %s)\n", name, args.out_dir.c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"plateau experiment runner"};
  app.require_subcommand(1);

  struct Sub {
    const char* name;
    const char* desc;
    RunFn fn;
    CommonArgs args;
    CLI::App* cmd = nullptr;
  };
  Sub subs[] = {
      {"landscape", "objective grid, heatmap and extrema summary", &pl_run_landscape, {}},
      {"variance_scan", "gradient variance over random targets vs the tail-sum bound",
       &pl_run_variance_scan, {}},
      {"trajectory", "oracle-driven training runs and cross-target independence",
       &pl_run_trajectory, {}},
      {"invariance", "whitening pipeline, invariance checks, transport, span coverage",
       &pl_run_invariance, {}},
      {"reduction_check", "halfspace-to-network equivalence, padding and rounding checks",
       &pl_run_reduction_check, {}},
  };
  for (auto& sub : subs) {
    sub.cmd = app.add_subcommand(sub.name, sub.desc);
    add_common(sub.cmd, sub.args);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  for (auto& sub : subs) {
    if (sub.cmd->parsed()) return run(sub.name, sub.fn, sub.args);
  }
  return kExitUsage;
}
