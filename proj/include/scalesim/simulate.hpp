#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "scalesim/coefficients.hpp"

namespace scalesim {

/// Grid states x_0 < ... < x_K with their scale values; absorbing at both ends.
struct ChainGrid {
  std::vector<double> states;
  std::vector<double> scale_values;

  std::size_t size() const { return states.size(); }
  /// Index of a grid state (exact match); throws if x is not on the grid.
  std::size_t index_of(double x) const;
};

/// Uniform fill of [lo, hi] at the given state spacing plus the required
/// points (deduplicated, each kept exactly). Scale values from spec.scale.
ChainGrid make_grid(const DiffusionSpec& spec, double lo, double hi,
                    double spacing, std::vector<double> required = {});

/// Same, with the spacing measured in scale units (grid points at
/// t(s(lo) + j * spacing)).
ChainGrid make_scale_grid(const DiffusionSpec& spec, double lo, double hi,
                          double spacing, std::vector<double> required = {});

/// Embedded birth-death chain of the diffusion on a grid.
struct ChainModel {
  ChainGrid grid;
  std::vector<double> p_up;   // per state; unused at the ends
  std::vector<double> tau;    // mean holding time (Green-kernel exit time)
  // Optional per-visit compensators, filled by attach_coefficients.
  std::vector<double> drift;  // E[int over the holding period of b(X) du]
  std::vector<double> qv;     // E[int over the holding period of sigma^2(X) du]
  bool has_coefficients = false;
};

ChainModel build_chain(const DiffusionSpec& spec, const ChainGrid& grid);

/// Per-visit compensators int G(x_k, y) mu(dy) for the drift measure mu_N and
/// for m~ of a (possibly different) coefficient spec sharing the interval.
/// The Green kernel is the one of `spec` (the chain's own scale).
void attach_coefficients(ChainModel& chain, const DiffusionSpec& spec,
                         const SmoothSignedMeasure& drift_measure,
                         const SpeedMeasure& martingale_measure);

enum class Scheme { Chain, Euler };
const char* to_string(Scheme s);

struct SimConfig {
  double horizon = 1.0;
  std::size_t paths = 1000;
  std::uint64_t seed = 1;
  /// Added to the path index to form the RNG stream id.
  std::uint64_t stream_base = 0;
  Scheme scheme = Scheme::Chain;
  double euler_step = 1e-3;
  double drift_cap = 1e6;
  /// States are recorded at these times (sorted, within [0, horizon]).
  std::vector<double> observation_times;
  /// When positive, QV is also accumulated from states sampled every
  /// qv_sample_step time units (PathSummary::sampled_qv).
  double qv_sample_step = 0.0;
  /// Full event trajectories are kept for the first `record_paths` paths.
  std::size_t record_paths = 0;
  bool parallel = true;
};

struct PathSample {
  std::uint64_t index = 0;
  std::uint64_t seed = 0;
  Scheme scheme = Scheme::Chain;
  std::vector<double> times;
  std::vector<double> states;
  std::optional<std::pair<double, double>> absorbed;  // (time, endpoint)
};

/// Per-path reductions, so large batches need not keep trajectories.
struct PathSummary {
  std::uint64_t index = 0;
  double start = 0.0;
  double final_state = 0.0;
  bool absorbed = false;
  double absorb_time = 0.0;
  std::vector<double> observed;  // states at config.observation_times
  std::size_t steps = 0;
  double qv = 0.0;           // sum of squared increments over [0, T]
  double sampled_qv = 0.0;   // same, on the qv_sample_step time grid
  double residual = 0.0;     // R = X - X_0 - compensated drift, completed visits
  double residual_qv = 0.0;  // sum of squared R increments
  double sigma2_time = 0.0;  // integrated sigma^2 over the same visits
  double elapsed = 0.0;      // time covered by the completed visits
  std::size_t clamp_events = 0;
};

struct BatchResult {
  std::vector<PathSummary> summaries;  // sorted by path index
  std::vector<PathSample> recorded;    // first config.record_paths paths
};

BatchResult simulate_chain(const ChainModel& chain, double x_start,
                           const SimConfig& config);

/// Exit events only: for each path, whether the chain started at x hits b
/// before a (grid states). Holding times are not drawn.
std::vector<std::uint8_t> simulate_exits(const ChainModel& chain, double a,
                                         double x, double b, std::size_t paths,
                                         std::uint64_t seed,
                                         std::uint64_t stream_base = 0,
                                         bool parallel = true);

/// Coefficients for the Euler scheme, from drift_b and sigma of a spec.
struct EulerModel {
  Coefficient b;
  Coefficient sigma;
  Interval interval;
};

EulerModel make_euler_model(const DiffusionSpec& spec);

BatchResult simulate_euler(const EulerModel& model, double x_start,
                           const SimConfig& config);

/// alpha-skew Brownian motion from the skew transform of (x, Lebesgue) at 0,
/// simulated by the chain on a uniform grid of the given spacing.
BatchResult simulate_skew_bm(double alpha, double x_start, const SimConfig& config,
                             double spacing = 0.05);

DiffusionSpec skew_bm_spec(double alpha);

}  // namespace scalesim
