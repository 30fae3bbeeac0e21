#include "sosaf/cli/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char **argv) {
  CLI::App app{"Speed-of-sound aberration analysis and autofocus beamforming"};
  app.require_subcommand(1);

  sosaf::cli::CommandRequest req;
  std::string config;
  std::uint64_t seed = 0;

  auto add_common = [&](CLI::App *sub) {
    sub->add_option("--config", config, "INI config file (defaults used when omitted)")
        ->check(CLI::ExistingFile);
    sub->add_option("--out", req.out_dir, "Output directory")->capture_default_str();
    sub->add_option("--threads", req.threads, "Worker threads (0 = all cores)")
        ->capture_default_str();
    sub->add_option("--seed", seed, "Override the config seed");
    sub->add_flag("--verbose", req.verbose, "Print stage progress");
  };
  add_common(app.add_subcommand("atlas", "Analytic c_opt, error and coherence maps"));
  add_common(app.add_subcommand("pipeline", "Simulate, beamform, autofocus and evaluate"));
  add_common(app.add_subcommand("bench", "Time the composite metric"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : sosaf::cli::exit_config;
  }

  for (auto *sub : app.get_subcommands()) {
    req.command = sub->get_name();
    if (!config.empty())
      req.config_path = config;
    if (sub->count("--seed"))
      req.seed = seed;
  }
  return sosaf::cli::run_command(req, std::cerr);
}
