#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "scalesim/verify.hpp"

namespace scalesim {

struct SpecBlock {
  std::string kind = "brownian";  // brownian | cantor | staircase | orey | skew
  // cantor: l_n = removal_scale * removal_ratio^n on [0, 1].
  int depth = 12;
  double removal_scale = 1.0;
  double removal_ratio = 0.25;
  // staircase
  int staircase_depth = 40;
  // orey
  std::string drift = "constant";  // zero | constant | sine | linear
  double drift_param = 1.0;
  // skew
  double alpha = 0.3;
  /// Subspace family members as fractions of the singular mass; empty means
  /// the base diffusion alone.
  std::vector<double> family;
};

struct SimBlock {
  double horizon = 1.0;
  std::size_t paths = 10000;
  double spacing = 0.02;
  double reach = 6.0;
  double x_start = 0.0;
  std::size_t record_paths = 5;
};

struct TestBlock {
  std::vector<std::string> names;
  bool has_window = false;
  Window window;
  std::size_t exit_events = 100000;
  double level = 0.01;
  std::size_t windows = 20;
  std::size_t probes = 1000;
  std::vector<double> alphas;
};

struct ExperimentConfig {
  std::string name;
  std::uint64_t seed = 0;
  SpecBlock spec;
  SimBlock sim;
  TestBlock tests;
  std::string out_dir = "out";
  /// Canonical key = value text of the whole configuration and of the spec
  /// block; the latter is hashed into every output.
  std::string canonical;
  std::string canonical_spec;
};

/// Known test names, in run order.
const std::vector<std::string>& known_tests();

/// Parses INI text (sections, key = value, `;` or `#` comments). Overrides are
/// `section.key=value` and are applied before validation. Throws ConfigError
/// naming the line or field.
ExperimentConfig parse_config(const std::string& text,
                              const std::vector<std::string>& overrides = {},
                              const std::string& source = "<config>");
ExperimentConfig load_config(const std::string& path,
                             const std::vector<std::string>& overrides = {});

}  // namespace scalesim
