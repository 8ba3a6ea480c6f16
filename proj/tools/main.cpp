#include <CLI11.hpp>
#include <cstdint>
#include <iostream>
#include <string>

#include "experiments.hpp"
#include "trajent/errors.hpp"
#include "trajent/version.hpp"

namespace exps = trajent::experiments;

int main(int argc, char** argv) {
  CLI::App app{"Quantum-trajectory entanglement experiments for a driven atom "
               "coupled to a damped cavity mode"};
  app.set_version_flag("--version", std::string(trajent::kVersion));
  app.require_subcommand(1);

  struct Args {
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int jobs = -1;
  };
  Args args;

  for (const auto& name : exps::kExperiments) {
    auto* sub = app.add_subcommand(name, "run the " + name + " experiment");
    sub->add_option("--config", args.config_path,
                    "JSON config (a previous run's manifest.json also works)");
    sub->add_option("--out", args.out_dir, "output directory");
    sub->add_option("--seed", args.seed, "master RNG seed")
        ->each([&args](const std::string&) { args.seed_set = true; });
    sub->add_option("--jobs", args.jobs, "worker threads (0 = all cores)");
  }

  CLI11_PARSE(app, argc, argv);

  const std::string experiment = app.get_subcommands().front()->get_name();
  try {
    exps::ExperimentConfig cfg;
    if (!args.config_path.empty()) {
      cfg = exps::load_config_file(args.config_path);
      if (cfg.experiment != experiment)
        throw exps::ConfigError("config is for experiment '" + cfg.experiment +
                                "' but subcommand is '" + experiment + "'");
    } else {
      nlohmann::json j;
      j["experiment"] = experiment;
      cfg = exps::config_from_json(j);
    }
    if (args.seed_set) cfg.seed = args.seed;
    if (args.jobs >= 0) cfg.jobs = args.jobs;
    if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;

    auto outcome = exps::run_experiment(cfg);
    for (const auto& c : outcome.checks) {
      std::cout << (c.passed ? "[PASS] " : "[FAIL] ") << c.name << ": "
                << c.details << " (metric " << c.metric << ", tolerance "
                << c.tolerance << ")\n";
    }
    std::cout << experiment << ": wrote " << outcome.files.size()
              << " file(s) under " << cfg.out_dir << "/" << experiment << "\n";
    if (!outcome.validation_passed) {
      std::cerr << "validation failed\n";
      return 1;
    }
    return 0;
  } catch (const exps::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
