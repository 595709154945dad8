#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "stclf/scenarios.hpp"

namespace stclf::cli {

// Command-line overrides.  Unset members fall back to the config file and
// then to the scenario defaults; set members always win.
struct Overrides {
  std::optional<std::string> scenario;
  std::optional<double> eps;
  std::optional<double> r;
  std::optional<double> r_star;
  std::optional<double> alpha;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> strategy;
  std::optional<std::string> out;
  std::optional<int> grid;
};

// A fully resolved unit of work: the scenario to operate on, where to write,
// and the optional field-grid density override.
struct Job {
  ScenarioBundle bundle;
  std::string out_dir;
  std::optional<int> field_points;
  std::uint64_t verify_seed = 2026;
};

// Loads the optional JSON config file, applies the flag overrides on top,
// validates every key, and resolves the output directory
// (flag > config > $STCLF_OUT_DIR > ./stclf-out).  Throws ConfigError.
Job build_job(const std::optional<std::string>& config_path, const Overrides& ov);

// Output-directory resolution alone, for subcommands that take no scenario.
std::string resolve_out_dir(const std::optional<std::string>& flag);

}  // namespace stclf::cli
