#pragma once

#include "sosaf/cli/config.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace sosaf::cli {

enum ExitCode : int { exit_ok = 0, exit_config = 1, exit_compute = 2 };

struct CommandContext {
  std::filesystem::path out_dir;
  bool verbose = false;
  std::ostream *log = nullptr; ///< progress and error messages; may be null
};

/// Each command writes its resolved config as `config.ini` in the output
/// directory before computing. Errors propagate as sosaf::Error; wrap the
/// call in run_command to get exit codes.
void cmd_atlas(const RunConfig &config, const CommandContext &ctx);
void cmd_pipeline(const RunConfig &config, const CommandContext &ctx);
void cmd_bench(const RunConfig &config, const CommandContext &ctx);

struct CommandRequest {
  std::string command; ///< atlas | pipeline | bench
  std::optional<std::filesystem::path> config_path;
  std::filesystem::path out_dir = "out";
  std::size_t threads = 0; ///< 0 = all cores
  std::optional<std::uint64_t> seed;
  bool verbose = false;
};

/// Loads and validates the config, then dispatches. Returns exit_config for
/// configuration problems, exit_compute for failures during a stage.
int run_command(const CommandRequest &request, std::ostream &log);

} // namespace sosaf::cli
