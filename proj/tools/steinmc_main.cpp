#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "steinmc/experiments.hpp"
#include "steinmc/report_io.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string default_output_dir() {
  const char* env = std::getenv("STEINMC_OUTDIR");
  return env != nullptr && *env != '\0' ? env : ".";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"steinmc: resampling-based multivariate normal approximation "
               "bounds, germ-grain and nearest-neighbour benches"};
  app.require_subcommand(1);

  std::string config_path;
  CLI::App* run_cmd =
      app.add_subcommand("run", "execute an experiment from a config file");
  run_cmd->add_option("config", config_path, "JSON config path")->required();

  unsigned selftest_workers = 2;
  std::string inject_fault;
  CLI::App* selftest_cmd = app.add_subcommand(
      "selftest", "run the enumeration-oracle and geometry invariants");
  selftest_cmd->add_option("--workers", selftest_workers, "worker count");
  selftest_cmd
      ->add_option("--inject-fault", inject_fault,
                   "force a named failure (supported: kappa)")
      ->check(CLI::IsMember({"kappa"}));

  CLI::App* describe_cmd =
      app.add_subcommand("describe", "print the config schema");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      const steinmc::ExperimentConfig config =
          steinmc::parse_config(read_file(config_path), default_output_dir());
      const steinmc::RunResult result = steinmc::run_experiment(config);
      std::cout << result.summary;
      std::cout << "config hash: " << std::hex
                << steinmc::config_hash(config.canonical) << std::dec << "\n";
      for (const auto& artifact : result.artifacts)
        std::cout << "wrote " << artifact.string() << "\n";
      return result.exit_code;
    }
    if (selftest_cmd->parsed()) {
      steinmc::SelfTestOptions opts;
      opts.workers = selftest_workers;
      opts.inject_kappa_fault = inject_fault == "kappa";
      const steinmc::SelfTestResult result = steinmc::run_selftest(opts);
      std::cout << result.render();
      return result.all_passed() ? 0 : 1;
    }
    if (describe_cmd->parsed()) {
      std::cout << steinmc::config_schema() << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
