#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "scalesim/config.hpp"
#include "scalesim/verify.hpp"

namespace scalesim {

/// brownian, cantor (l_n = 4^-n, depth 12, m = m~), staircase (m = m~),
/// orey (b = 1), skew (alpha = 0.3).
DiffusionSpec bundled_spec(const std::string& name);

DiffusionSpec build_spec(const SpecBlock& block);

/// s_c for c = fraction * kappa mass, all with the base speed measure.
std::vector<DiffusionSpec> build_family(const DiffusionSpec& base,
                                        const std::vector<double>& fractions);

struct RunResult {
  std::vector<TestReport> reports;
  std::vector<std::string> files;  // relative to the output directory
  bool all_pass() const { return scalesim::all_pass(reports); }
};

/// construct -> validate_hypotheses -> simulate -> verify, writing every
/// output file under config.out_dir.
RunResult run_experiment(const ExperimentConfig& config, std::ostream& log);

/// Analytic facts of the configured spec; no simulation.
void describe_experiment(const ExperimentConfig& config, std::ostream& os);

}  // namespace scalesim
