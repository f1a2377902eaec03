#include "scalesim/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "scalesim/errors.hpp"
#include "scalesim/rng.hpp"

namespace scalesim {

std::size_t ChainGrid::index_of(double x) const {
  auto it = std::lower_bound(states.begin(), states.end(), x);
  if (it == states.end() || *it != x) {
    throw ConfigError("state " + std::to_string(x) + " is not a grid point");
  }
  return static_cast<std::size_t>(it - states.begin());
}

namespace {

ChainGrid finish_grid(const DiffusionSpec& spec, std::vector<double> fill,
                      std::vector<double> required, double min_gap) {
  double lo = fill.front();
  double hi = fill.back();
  for (double r : required) {
    if (!(r >= lo && r <= hi)) {
      throw ConfigError("required grid point outside the grid range");
    }
  }
  std::sort(required.begin(), required.end());
  required.erase(std::unique(required.begin(), required.end()), required.end());
  // Fill points too close to a required point are dropped; required points
  // are kept exactly.
  std::vector<double> pts = required;
  for (double f : fill) {
    auto it = std::lower_bound(required.begin(), required.end(), f);
    bool near = false;
    if (it != required.end() && *it - f < min_gap) near = true;
    if (it != required.begin() && f - *(it - 1) < min_gap) near = true;
    if (!near) pts.push_back(f);
  }
  std::sort(pts.begin(), pts.end());
  ChainGrid g;
  g.states = std::move(pts);
  g.scale_values.reserve(g.states.size());
  for (double x : g.states) g.scale_values.push_back(spec.scale->value(x));
  for (std::size_t i = 1; i < g.size(); ++i) {
    if (!(g.scale_values[i] > g.scale_values[i - 1])) {
      throw ConfigError("grid points are not separated in scale");
    }
  }
  return g;
}

void check_range(const DiffusionSpec& spec, double lo, double hi) {
  Interval I = spec.interval();
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi) || lo < I.lo ||
      hi > I.hi) {
    throw ConfigError("grid range must be a finite subinterval of the domain");
  }
}

}  // namespace

ChainGrid make_grid(const DiffusionSpec& spec, double lo, double hi,
                    double spacing, std::vector<double> required) {
  check_range(spec, lo, hi);
  if (!(spacing > 0)) throw ConfigError("grid spacing must be positive");
  auto n = static_cast<std::size_t>(std::ceil((hi - lo) / spacing));
  n = std::max<std::size_t>(n, 2);
  std::vector<double> fill(n + 1);
  for (std::size_t j = 0; j <= n; ++j) {
    fill[j] = j == n ? hi : lo + (hi - lo) * static_cast<double>(j) / n;
  }
  required.push_back(lo);
  required.push_back(hi);
  return finish_grid(spec, std::move(fill), std::move(required),
                     0.25 * (hi - lo) / n);
}

ChainGrid make_scale_grid(const DiffusionSpec& spec, double lo, double hi,
                          double spacing, std::vector<double> required) {
  check_range(spec, lo, hi);
  if (!(spacing > 0)) throw ConfigError("grid spacing must be positive");
  double slo = spec.scale->value(lo);
  double shi = spec.scale->value(hi);
  auto n = static_cast<std::size_t>(std::ceil((shi - slo) / spacing));
  n = std::max<std::size_t>(n, 2);
  std::vector<double> fill(n + 1);
  for (std::size_t j = 0; j <= n; ++j) {
    if (j == 0) {
      fill[j] = lo;
    } else if (j == n) {
      fill[j] = hi;
    } else {
      fill[j] = std::clamp(spec.inverse(slo + (shi - slo) * static_cast<double>(j) / n),
                           lo, hi);
    }
  }
  required.push_back(lo);
  required.push_back(hi);
  // Gaps measured in state units can be tiny where s is steep; only exact
  // duplicates are merged here.
  return finish_grid(spec, std::move(fill), std::move(required), 0.0);
}

namespace {

// Cell integrals of (s(y) - s_j) and (s_{j+1} - s(y)) over (x_j, x_{j+1}].
template <class Integrator>
void green_cells(const ChainGrid& g, const ScaleModel& s, Integrator&& integ,
                 std::vector<double>& A, std::vector<double>& B) {
  std::size_t K = g.size() - 1;
  A.assign(K, 0.0);
  B.assign(K, 0.0);
  for (std::size_t j = 0; j < K; ++j) {
    double sj = g.scale_values[j];
    double sj1 = g.scale_values[j + 1];
    A[j] = integ([&](double y) { return s.value(y) - sj; }, g.states[j], g.states[j + 1]);
    B[j] = integ([&](double y) { return sj1 - s.value(y); }, g.states[j], g.states[j + 1]);
  }
}

// int G_k(x_k, y) mu(dy) over (x_{k-1}, x_{k+1}) from the cell integrals.
std::vector<double> green_sums(const ChainGrid& g, const std::vector<double>& A,
                               const std::vector<double>& B) {
  std::size_t K = g.size() - 1;
  std::vector<double> out(g.size(), 0.0);
  for (std::size_t k = 1; k < K; ++k) {
    double dl = g.scale_values[k] - g.scale_values[k - 1];
    double du = g.scale_values[k + 1] - g.scale_values[k];
    // The atom of mu at x_k sits in cell k-1; its kernel weight is dl * du.
    out[k] = 2.0 * (A[k - 1] * du + B[k] * dl) / (dl + du);
  }
  return out;
}

}  // namespace

ChainModel build_chain(const DiffusionSpec& spec, const ChainGrid& grid) {
  if (grid.size() < 3) throw ConfigError("chain grid needs at least 3 states");
  ChainModel c;
  c.grid = grid;
  std::size_t K = grid.size() - 1;
  c.p_up.assign(grid.size(), 0.0);
  for (std::size_t k = 1; k < K; ++k) {
    double dl = grid.scale_values[k] - grid.scale_values[k - 1];
    double du = grid.scale_values[k + 1] - grid.scale_values[k];
    c.p_up[k] = dl / (dl + du);
  }
  std::vector<double> A, B;
  green_cells(grid, *spec.scale,
              [&](const std::function<double(double)>& f, double a, double b) {
                return spec.speed.integrate(f, a, b, 1e-9, 10);
              },
              A, B);
  c.tau = green_sums(grid, A, B);
  for (std::size_t k = 1; k < K; ++k) {
    if (!(c.tau[k] > 0) || !std::isfinite(c.tau[k])) {
      throw RuntimeError("non-positive holding time at grid state " +
                         std::to_string(grid.states[k]));
    }
  }
  return c;
}

void attach_coefficients(ChainModel& chain, const DiffusionSpec& spec,
                         const SmoothSignedMeasure& drift_measure,
                         const SpeedMeasure& martingale_measure) {
  std::vector<double> A, B;
  green_cells(chain.grid, *spec.scale,
              [&](const std::function<double(double)>& f, double a, double b) {
                return drift_measure.integrate(f, a, b, SmoothSignedMeasure::Part::Signed, 1e-9, 10);
              },
              A, B);
  chain.drift = green_sums(chain.grid, A, B);
  green_cells(chain.grid, *spec.scale,
              [&](const std::function<double(double)>& f, double a, double b) {
                return martingale_measure.integrate(f, a, b, 1e-9, 10);
              },
              A, B);
  chain.qv = green_sums(chain.grid, A, B);
  chain.has_coefficients = true;
}

const char* to_string(Scheme s) { return s == Scheme::Chain ? "chain" : "euler"; }

namespace {

void check_config(const SimConfig& cfg) {
  if (!(cfg.horizon > 0) || !std::isfinite(cfg.horizon)) {
    throw ConfigError("horizon must be positive and finite");
  }
  if (!std::is_sorted(cfg.observation_times.begin(), cfg.observation_times.end())) {
    throw ConfigError("observation times must be sorted");
  }
  for (double t : cfg.observation_times) {
    if (t < 0 || t > cfg.horizon) throw ConfigError("observation time outside [0, T]");
  }
}

template <class Kernel>
BatchResult run_batch(const SimConfig& cfg, Kernel&& kernel) {
  BatchResult r;
  r.summaries.resize(cfg.paths);
  std::size_t nrec = std::min(cfg.record_paths, cfg.paths);
  r.recorded.resize(nrec);
  auto n = static_cast<std::int64_t>(cfg.paths);
  if (cfg.parallel) {
#pragma omp parallel for schedule(dynamic, 64)
    for (std::int64_t i = 0; i < n; ++i) {
      auto idx = static_cast<std::size_t>(i);
      kernel(idx, r.summaries[idx], idx < nrec ? &r.recorded[idx] : nullptr);
    }
  } else {
    for (std::int64_t i = 0; i < n; ++i) {
      auto idx = static_cast<std::size_t>(i);
      kernel(idx, r.summaries[idx], idx < nrec ? &r.recorded[idx] : nullptr);
    }
  }
  return r;
}

}  // namespace

BatchResult simulate_chain(const ChainModel& chain, double x_start,
                           const SimConfig& cfg) {
  check_config(cfg);
  const ChainGrid& g = chain.grid;
  std::size_t start = g.index_of(x_start);
  std::size_t K = g.size() - 1;
  const double T = cfg.horizon;
  const auto& obs = cfg.observation_times;
  bool comp = chain.has_coefficients;

  return run_batch(cfg, [&](std::size_t i, PathSummary& out, PathSample* rec) {
    Rng rng(cfg.seed, cfg.stream_base + i);
    out.index = i;
    out.start = x_start;
    out.observed.assign(obs.size(), 0.0);
    if (rec) {
      rec->index = i;
      rec->seed = cfg.seed;
      rec->scheme = Scheme::Chain;
      rec->times.push_back(0.0);
      rec->states.push_back(x_start);
    }
    std::size_t k = start;
    std::size_t oi = 0;
    double t = 0.0;
    const double dt = cfg.qv_sample_step;
    std::size_t sj = 1;
    double last_sample = x_start;
    // Samples at times j*dt < until (all remaining ones when until > T).
    auto sample_until = [&](double until) {
      if (!(dt > 0)) return;
      while (true) {
        double ts = dt * static_cast<double>(sj);
        if (ts > T * (1 + 1e-12) || ts >= until) break;
        double d = g.states[k] - last_sample;
        out.sampled_qv += d * d;
        last_sample = g.states[k];
        ++sj;
      }
    };
    while (true) {
      if (k == 0 || k == K) {
        out.absorbed = true;
        out.absorb_time = t;
        if (rec) rec->absorbed = std::make_pair(t, g.states[k]);
        break;
      }
      double hold = rng.exponential(chain.tau[k]);
      bool up = rng.uniform() < chain.p_up[k];
      double tn = t + hold;
      while (oi < obs.size() && obs[oi] < tn) out.observed[oi++] = g.states[k];
      sample_until(tn);
      if (tn > T) break;
      std::size_t kn = up ? k + 1 : k - 1;
      double dx = g.states[kn] - g.states[k];
      out.qv += dx * dx;
      if (comp) {
        double r = dx - chain.drift[k];
        out.residual += r;
        out.residual_qv += r * r;
        out.sigma2_time += hold * chain.qv[k] / chain.tau[k];
        out.elapsed = tn;
      }
      ++out.steps;
      t = tn;
      k = kn;
      if (rec) {
        rec->times.push_back(t);
        rec->states.push_back(g.states[k]);
      }
    }
    while (oi < obs.size()) out.observed[oi++] = g.states[k];
    sample_until(std::numeric_limits<double>::infinity());
    out.final_state = g.states[k];
    if (rec && rec->times.back() < T && !out.absorbed) {
      rec->times.push_back(T);
      rec->states.push_back(g.states[k]);
    }
  });
}

std::vector<std::uint8_t> simulate_exits(const ChainModel& chain, double a,
                                         double x, double b, std::size_t paths,
                                         std::uint64_t seed,
                                         std::uint64_t stream_base, bool parallel) {
  const ChainGrid& g = chain.grid;
  std::size_t ia = g.index_of(a);
  std::size_t ix = g.index_of(x);
  std::size_t ib = g.index_of(b);
  if (!(ia < ix && ix < ib)) throw ConfigError("exit window needs a < x < b");
  std::vector<std::uint8_t> hits(paths, 0);
  auto n = static_cast<std::int64_t>(paths);
  auto kernel = [&](std::int64_t i) {
    Rng rng(seed, stream_base + static_cast<std::uint64_t>(i));
    std::size_t k = ix;
    while (k != ia && k != ib) k = rng.uniform() < chain.p_up[k] ? k + 1 : k - 1;
    hits[static_cast<std::size_t>(i)] = k == ib ? 1 : 0;
  };
  if (parallel) {
#pragma omp parallel for schedule(dynamic, 256)
    for (std::int64_t i = 0; i < n; ++i) kernel(i);
  } else {
    for (std::int64_t i = 0; i < n; ++i) kernel(i);
  }
  return hits;
}

EulerModel make_euler_model(const DiffusionSpec& spec) {
  DriftResult d = drift_b(spec);
  if (!d.is_function) {
    throw RuntimeError("drift is a measure with atoms; the Euler scheme needs a function");
  }
  return EulerModel{d.b, sigma(spec), spec.interval()};
}

BatchResult simulate_euler(const EulerModel& model, double x_start,
                           const SimConfig& cfg) {
  check_config(cfg);
  if (!(cfg.euler_step > 0)) throw ConfigError("euler step must be positive");
  if (!model.interval.contains(x_start)) throw ConfigError("start outside the domain");
  const double T = cfg.horizon;
  auto nsteps = static_cast<std::size_t>(std::ceil(T / cfg.euler_step - 1e-9));
  const double h = T / static_cast<double>(nsteps);
  const double sh = std::sqrt(h);
  const auto& obs = cfg.observation_times;

  return run_batch(cfg, [&](std::size_t i, PathSummary& out, PathSample* rec) {
    Rng rng(cfg.seed, cfg.stream_base + i);
    out.index = i;
    out.start = x_start;
    out.observed.assign(obs.size(), 0.0);
    if (rec) {
      rec->index = i;
      rec->seed = cfg.seed;
      rec->scheme = Scheme::Euler;
      rec->times.push_back(0.0);
      rec->states.push_back(x_start);
    }
    auto drift = [&](double x) {
      double b = model.b(x);
      if (!(std::abs(b) <= cfg.drift_cap)) {
        ++out.clamp_events;
        b = std::isnan(b) ? 0.0 : std::copysign(cfg.drift_cap, b);
      }
      return b;
    };
    double x = x_start;
    double bx = drift(x);
    double sx = model.sigma(x);
    std::size_t oi = 0;
    while (oi < obs.size() && obs[oi] <= 0.0) out.observed[oi++] = x;
    for (std::size_t n = 1; n <= nsteps; ++n) {
      double t = h * static_cast<double>(n);
      double xn = x + bx * h + sx * sh * rng.normal();
      if (!model.interval.contains(xn)) {
        xn = xn <= model.interval.lo ? model.interval.lo : model.interval.hi;
        out.absorbed = true;
        out.absorb_time = t;
      }
      double dx = xn - x;
      out.qv += dx * dx;
      double bn = out.absorbed ? 0.0 : drift(xn);
      double sn = out.absorbed ? 0.0 : model.sigma(xn);
      double r = dx - 0.5 * (bx + bn) * h;
      out.residual += r;
      out.residual_qv += r * r;
      out.sigma2_time += 0.5 * (sx * sx + sn * sn) * h;
      out.elapsed = t;
      ++out.steps;
      x = xn;
      bx = bn;
      sx = sn;
      while (oi < obs.size() && obs[oi] <= t + 0.5 * h) out.observed[oi++] = x;
      if (rec) {
        rec->times.push_back(t);
        rec->states.push_back(x);
      }
      if (out.absorbed) {
        if (rec) rec->absorbed = std::make_pair(t, x);
        break;
      }
    }
    while (oi < obs.size()) out.observed[oi++] = x;
    out.sampled_qv = out.qv;
    out.final_state = x;
  });
}

DiffusionSpec skew_bm_spec(double alpha) {
  if (!(alpha > 0 && alpha < 1)) throw ConfigError("skew alpha must be in (0, 1)");
  return make_spec("skew", skew_scale(identity_scale(), 0.0, 1.0 / alpha, 1.0 / (1.0 - alpha)),
                   SpeedMeasure::lebesgue().skewed(0.0, alpha, 1.0 - alpha));
}

BatchResult simulate_skew_bm(double alpha, double x_start, const SimConfig& config,
                             double spacing) {
  DiffusionSpec spec = skew_bm_spec(alpha);
  // Absorbing ends far enough out that they are not reached before T in
  // practice; 0 and the start are exact grid states.
  double reach = 10.0 * std::sqrt(config.horizon);
  double lo = std::floor((std::min(0.0, x_start) - reach) / spacing) * spacing;
  double hi = std::ceil((std::max(0.0, x_start) + reach) / spacing) * spacing;
  ChainGrid g = make_grid(spec, lo, hi, spacing, {0.0, x_start});
  ChainModel c = build_chain(spec, g);
  return simulate_chain(c, x_start, config);
}

}  // namespace scalesim
