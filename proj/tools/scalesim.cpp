#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <omp.h>

#include "CLI11.hpp"
#include "scalesim/config.hpp"
#include "scalesim/document.hpp"
#include "scalesim/errors.hpp"
#include "scalesim/experiment.hpp"

namespace {

enum Status { kOk = 0, kTestFail = 1, kConfigError = 2, kRuntimeError = 3 };

bool apply_thread_env() {
  const char* env = std::getenv("SCALESIM_THREADS");
  if (!env || !*env) return true;
  try {
    std::size_t pos = 0;
    int n = std::stoi(env, &pos);
    if (pos != std::string(env).size() || n < 1) return false;
    omp_set_num_threads(n);
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"scalesim: diffusions from a scale function and a speed measure"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> paths;
  std::optional<std::string> out_dir;
  std::vector<std::string> overrides;

  auto* run = app.add_subcommand("run", "simulate and verify an experiment");
  auto* describe = app.add_subcommand("describe", "print analytic facts of the configured spec");
  auto* version = app.add_subcommand("version", "print the tool version");
  for (auto* sub : {run, describe}) {
    sub->add_option("--config", config_path, "experiment configuration file")->required();
    sub->add_option("--seed", seed, "global seed");
    sub->add_option("--override", overrides, "section.key=value (repeatable)");
  }
  run->add_option("--paths", paths, "paths per simulation");
  run->add_option("--out", out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }

  if (version->parsed()) {
    std::cout << "scalesim " << scalesim::kVersion << " (config grammar "
              << scalesim::kConfigGrammar << ")\n";
    return kOk;
  }
  if (!apply_thread_env()) {
    std::cerr << "error: SCALESIM_THREADS must be a positive integer\n";
    return kConfigError;
  }

  if (seed) overrides.push_back("experiment.seed=" + std::to_string(*seed));
  if (paths) overrides.push_back("simulation.paths=" + std::to_string(*paths));
  if (out_dir) overrides.push_back("output.dir=" + *out_dir);

  scalesim::ExperimentConfig cfg;
  try {
    cfg = scalesim::load_config(config_path, overrides);
  } catch (const scalesim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  }

  try {
    if (describe->parsed()) {
      scalesim::describe_experiment(cfg, std::cout);
      return kOk;
    }
    scalesim::RunResult r = scalesim::run_experiment(cfg, std::cerr);
    scalesim::write_reports_table(std::cout, r.reports);
    std::cout << "outputs in " << cfg.out_dir << ":";
    for (const auto& f : r.files) std::cout << ' ' << f;
    std::cout << '\n';
    return r.all_pass() ? kOk : kTestFail;
  } catch (const scalesim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const scalesim::HypothesisFailure& e) {
    std::cerr << "hypothesis " << e.hypothesis() << " failed: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << '\n';
    return kRuntimeError;
  }
}
