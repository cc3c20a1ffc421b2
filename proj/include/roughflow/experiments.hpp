#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "roughflow/config.hpp"

namespace roughflow {

const std::vector<std::string>& experiment_kinds();

struct ExperimentConfig {
  std::string kind;
  Config params;
  std::optional<uint64_t> seed;
  int workers = 1;
  std::string out_dir = ".";
};

// seed precedence: explicit value, then [run] seed, then ROUGHFLOW_SEED
std::optional<uint64_t> resolve_seed(std::optional<uint64_t> cli, const Config& params);

struct Violation {
  std::string constraint;
  std::string detail;
};

// empty iff the config is runnable
std::vector<Violation> validate(const ExperimentConfig& cfg);

struct CsvFile {
  std::string name;
  std::string text;
};

struct ExperimentResult {
  nlohmann::json report;
  std::vector<CsvFile> files;  // CSV and auxiliary outputs, written next to report.json
  bool all_pass = false;
};

// runs a validated config without touching the filesystem; errors propagate as exceptions
ExperimentResult run_experiment(const ExperimentConfig& cfg);

// validate, run, write outputs; returns 0 all pass, 1 some verdict failed, 2 validation, 3 divergence
int run(const ExperimentConfig& cfg, std::ostream& log);

}  // namespace roughflow
