#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace steinmc {

// Parsed experiment configuration (one structured JSON file; no loose
// positional parameters, so runs are citable by config + seed).
struct ExperimentConfig {
  std::string experiment;  // gamma | boolean-model | sigma-series | knn |
                           // rate-study
  std::uint64_t seed = 1;
  unsigned workers = 2;
  std::filesystem::path output_dir;

  // model parameters
  int d = 2;
  std::vector<std::size_t> n_grid;
  double radius = 0.3;
  std::size_t k = 1;
  double p = 12.0;
  std::string law = "cube-vertices";  // rate-study coordinate law

  // estimator parameters
  std::size_t reps = 20000;
  std::size_t inner_reps = 2;
  std::size_t replicates = 10000;
  std::size_t k_max = 12;
  std::size_t mc_samples = 200000;
  std::size_t samples_per_n = 100000;
  std::size_t class_directions = 64;
  std::size_t class_thresholds = 256;
  std::size_t corners_per_axis = 16;

  std::string canonical;  // canonical JSON rendering (hashed for provenance)
};

// Parses and validates; on failure lists every offending field.
ExperimentConfig parse_config(const std::string& json_text,
                              const std::string& default_output_dir);

// Prints the config schema (for the `describe` subcommand).
std::string config_schema();

struct RunResult {
  int exit_code = 0;
  std::vector<std::filesystem::path> artifacts;
  std::string summary;
};

RunResult run_experiment(const ExperimentConfig& config);

// Enumeration-oracle selftest; one line per invariant.
struct SelfTestResult {
  std::vector<std::pair<std::string, bool>> checks;
  bool all_passed() const;
  std::string render() const;
};

struct SelfTestOptions {
  unsigned workers = 2;
  bool inject_kappa_fault = false;  // corrupts the table copy under test
};

SelfTestResult run_selftest(const SelfTestOptions& opts);

}  // namespace steinmc
