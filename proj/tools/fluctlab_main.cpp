#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <string>

#include "fluctlab/experiments.hpp"

// Experiment runner. Each subcommand fixes the experiment id; everything else
// comes from --config with flag overrides applied on top. Exit code 0 means
// every assertion in the run passed.
int main(int argc, char **argv) {
  CLI::App app{"fluctlab: interface fluctuation experiments"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::uint64_t seed = 0;
  int threads = 0;
  bool have_seed = false;

  app.add_option("--config", config_path, "key = value config file");
  app.add_option("--seed", seed, "RNG seed override")
      ->each([&](const std::string &) { have_seed = true; });
  app.add_option("--out", out_dir, "output directory override");
  app.add_option("--threads", threads, "worker threads (0 = default)");

  const char *experiments[] = {"profile-sweep", "spectrum-sweep", "constants",
                               "spde-linear",   "spde-limit",     "offsite",
                               "gk-run",        "interface-track", "report"};
  std::vector<std::pair<CLI::App *, std::string>> subs;
  std::vector<std::vector<std::string>> set_args(std::size(experiments));
  for (std::size_t i = 0; i < std::size(experiments); ++i) {
    CLI::App *sub = app.add_subcommand(experiments[i]);
    sub->add_option("--set", set_args[i],
                    "extra key=value overrides (repeatable)");
    subs.push_back({sub, experiments[i]});
  }

  CLI11_PARSE(app, argc, argv);

  try {
    fl::ExperimentConfig cfg;
    if (!config_path.empty()) cfg = fl::parse_config_file(config_path);
    for (std::size_t i = 0; i < subs.size(); ++i) {
      if (subs[i].first->parsed()) {
        cfg.experiment = subs[i].second;
        for (const auto &kv : set_args[i]) {
          const auto eq = kv.find('=');
          if (eq == std::string::npos)
            throw std::invalid_argument("--set expects key=value");
          fl::apply_override(cfg, kv.substr(0, eq), kv.substr(eq + 1));
        }
      }
    }
    if (have_seed) cfg.seed = seed;
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (threads > 0) cfg.threads = threads;
    return fl::run_experiment(cfg);
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
