#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "scalesim/coefficients.hpp"
#include "scalesim/simulate.hpp"

namespace scalesim {

/// Where a reference value comes from: a closed-form expression, a defining
/// property of the construction, or a published theorem or example.
enum class Provenance { ClosedForm, Definitional, PublishedResult };
const char* to_string(Provenance p);

/// pass is true exactly when observed lies within the band.
struct TestReport {
  std::string name;
  double observed = 0.0;
  double reference = 0.0;
  Provenance provenance = Provenance::ClosedForm;
  std::string band;
  bool pass = false;
};

bool all_pass(const std::vector<TestReport>& reports);

/// (s(x) - s(a)) / (s(b) - s(a)).
double exit_probability(const DiffusionSpec& spec, double a, double x, double b);

struct Window {
  double a = 0.0;
  double x = 0.0;
  double b = 0.0;
};

struct ExitExperiment {
  std::vector<DiffusionSpec> family;
  Window window;
  std::size_t n_paths = 100000;
  std::uint64_t seed = 1;
  double level = 0.01;
  bool parallel = true;
};

struct WindowValidation {
  bool approved = false;
  /// Smallest |P_i - P_j| over analytically different pairs, in units of the
  /// two-proportion standard error at n_paths (infinity when all are equal).
  double min_separation = 0.0;
  std::string reason;
};

/// Approves the window when a < x < b lies in every interval and every pair
/// with different exact exit probabilities is separated by >= 5 standard errors.
WindowValidation validate_window(const ExitExperiment& exp);

/// Pairwise two-proportion z-tests on simulated exit events. A pair with
/// different exact probabilities passes when p < level; an exactly equal pair
/// passes when p >= level. Throws ConfigError when the window is not approved.
std::vector<TestReport> distinctness_test(const ExitExperiment& exp);

/// Two-sided p-value of the pooled two-proportion z-test.
double two_proportion_p(std::size_t k1, std::size_t n1, std::size_t k2, std::size_t n2);

/// Chain simulation settings shared by the path tests.
struct PathTestConfig {
  double x_start = 0.0;
  double horizon = 1.0;
  std::size_t paths = 10000;
  std::uint64_t seed = 1;
  std::uint64_t stream_base = 0;
  /// Absorbing grid ends at x_start -/+ reach, clipped inside the domain.
  double reach = 6.0;
  double spacing = 0.02;
  bool parallel = true;
};

/// Chain grid used by the path tests: uniform fill plus the start point and the
/// endpoints of the singular part's hull.
ChainGrid path_test_grid(const DiffusionSpec& spec, const PathTestConfig& cfg);

/// Mean realized QV over [0, T] against T. Requires m = m~.
TestReport qv_test(const DiffusionSpec& spec, const PathTestConfig& cfg);

/// Simulates the chain of `spec` and compensates with b and sigma taken from
/// `coefficients` (the same spec, or one claimed to share its coefficients).
/// Reports the mean residual against 0 (3 SE) and the realized QV of the
/// residual against the integrated sigma^2 (5%).
std::vector<TestReport> drift_consistency_test(const DiffusionSpec& spec,
                                               const DiffusionSpec& coefficients,
                                               const PathTestConfig& cfg);
std::vector<TestReport> drift_consistency_test(const DiffusionSpec& spec,
                                               const PathTestConfig& cfg);

/// Mean displacement of the alpha-skew chain from 0 against
/// (1 - 2 alpha) sqrt(2T/pi) (3 SE), plus a one-sided sign check at 0.99
/// when alpha != 1/2.
std::vector<TestReport> skew_localtime_test(double alpha, const PathTestConfig& cfg);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Two-sample Kolmogorov-Smirnov statistic with the asymptotic p-value.
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

/// Exit frequency of the chain over one window against exit_probability,
/// within the 3 sigma binomial band.
TestReport exit_law_test(const DiffusionSpec& spec, const Window& w,
                         std::size_t paths, std::uint64_t seed,
                         bool parallel = true);

/// Random windows inside the spec's probe window, each at least 5% of it wide.
std::vector<Window> random_windows(const DiffusionSpec& spec, std::size_t count,
                                   std::uint64_t seed);

}  // namespace scalesim
