#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hmc_search/training.hpp"

namespace hmc_search {

/// Everything a subcommand needs; serialised into the run manifest.
struct RunOptions {
  std::string command;
  Hyperparams hp;
  std::uint64_t seed = 1;
  std::optional<int> runs;      // agents / runs per sweep value
  std::optional<int> episodes;  // evaluation episodes
  int jobs = 1;
  std::optional<std::string> qtable;  // load instead of training
  std::optional<nlohmann::json> plan;
  std::optional<double> gamma;  // demos only
};

[[nodiscard]] nlohmann::json to_json(const RunOptions& opts);
[[nodiscard]] RunOptions run_options_from_json(const nlohmann::json& j);

/// Runs one subcommand, writing its files into `out_dir`. Returns the manifest (also written
/// there as manifest.json).
nlohmann::json run_command(const RunOptions& opts, const std::filesystem::path& out_dir);

/// Command-line entry point. 0 on success, 1 on a usage error, 2 on a runtime error.
int dispatch(int argc, const char* const* argv);
int dispatch(const std::vector<std::string>& args);  // args excludes the program name

}  // namespace hmc_search
