#include <CLI11.hpp>
#include <iostream>

#include "roughflow/errors.hpp"
#include "roughflow/experiments.hpp"

int main(int argc, char** argv) {
  using namespace roughflow;
  CLI::App app{"roughflow: rough driver and turbulence homogenization experiments"};
  std::string kind, config_path, out = ".";
  std::optional<uint64_t> seed;
  int workers = 1;
  app.add_option("kind", kind, "experiment kind")->required()->check(CLI::IsMember(experiment_kinds()));
  app.add_option("--config", config_path, "config file ([section] and key = value lines)")->required();
  app.add_option("--seed", seed, "master seed (falls back to [run] seed, then ROUGHFLOW_SEED)");
  app.add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--out", out, "output directory");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  ExperimentConfig cfg;
  cfg.kind = kind;
  cfg.seed = seed;
  cfg.workers = workers;
  cfg.out_dir = out;
  try {
    cfg.params = Config::load(config_path);
  } catch (const ArgumentError& e) {
    std::cerr << "validation error [config parses]: " << e.what() << "\n";
    return 2;
  }
  return run(cfg, std::cerr);
}
