#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "superlap/config.hpp"

namespace superlap::cli {

enum ExitCode : int { kSuccess = 0, kAssertionFailure = 1, kConfigError = 2 };

const std::vector<std::string>& commands();

/// Runs one command, writing summary.json, summary.csv and per-command CSVs
/// under cfg.out_dir. Configuration and measure-condition errors return 2,
/// failed assertions return 1.
int run(const std::string& command, const RunConfig& cfg, std::ostream& log);

struct Invocation {
  std::string command;
  std::string config_path;
  std::vector<std::string> overrides;  // section.key=value
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
};

/// Loads the config, applies overrides, then calls run; config errors map to 2.
int run(const Invocation& inv, std::ostream& log);

}  // namespace superlap::cli
