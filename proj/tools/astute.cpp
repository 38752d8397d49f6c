#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "astute/harness/config.hpp"
#include "astute/harness/experiments.hpp"

namespace {

constexpr int kExitConfig = 2;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Astuteness and stable-rank experiments for small MLPs"};
  app.require_subcommand(1, 1);
  std::string config_path;
  long long seed = -1;
  std::string out_dir;
  for (const auto& name : astute::harness::command_names()) {
    auto* sub = app.add_subcommand(name, "run the " + name + " experiment");
    sub->add_option("--config", config_path, "JSON experiment config")->required();
    sub->add_option("--seed", seed, "run a single seed instead of the config's list")->check(CLI::NonNegativeNumber);
    sub->add_option("--out", out_dir, "output directory (overrides output_dir)");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  try {
    auto cfg = astute::harness::load_config(config_path);
    if (seed >= 0) cfg.seeds = {static_cast<std::uint64_t>(seed)};
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    astute::harness::run_command(command, cfg);
    std::cout << command << ": wrote " << cfg.output_dir << "/manifest.json\n";
    return 0;
  } catch (const astute::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
