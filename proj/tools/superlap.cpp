#include <iostream>

#include "CLI11.hpp"
#include "superlap/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"superlap: superposition fractional p-Laplacian toolkit"};
  superlap::cli::Invocation inv;
  std::uint64_t seed = 0;
  std::string out;
  app.add_option("command", inv.command, "Command to run")
      ->required()
      ->check(CLI::IsMember(superlap::cli::commands()));
  app.add_option("--config,-c", inv.config_path, "Run configuration file")->required()->check(CLI::ExistingFile);
  auto* seed_opt = app.add_option("--seed", seed, "Random seed (overrides [command] seed)");
  auto* out_opt = app.add_option("--out", out, "Output directory");
  app.add_option("--set", inv.overrides, "Override a scalar field: section.key=value");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : superlap::cli::kConfigError;
  }
  if (*seed_opt) inv.seed = seed;
  if (*out_opt) inv.out_dir = out;
  return superlap::cli::run(inv, std::cerr);
}
