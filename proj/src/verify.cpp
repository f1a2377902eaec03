#include "scalesim/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>

#include "scalesim/errors.hpp"
#include "scalesim/format.hpp"
#include "scalesim/rng.hpp"

namespace scalesim {

const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::ClosedForm: return "closed-form";
    case Provenance::Definitional: return "definitional";
    case Provenance::PublishedResult: return "published-result";
  }
  return "?";
}

bool all_pass(const std::vector<TestReport>& reports) {
  return std::all_of(reports.begin(), reports.end(),
                     [](const TestReport& r) { return r.pass; });
}

double exit_probability(const DiffusionSpec& spec, double a, double x, double b) {
  Interval I = spec.interval();
  if (!(a < x && x < b) || !I.contains_closed(a) || !I.contains_closed(b)) {
    throw DomainError("exit window needs a < x < b inside the interval");
  }
  const ScaleModel& s = *spec.scale;
  double sa = s.value(a);
  double sb = s.value(b);
  if (!std::isfinite(sa) || !std::isfinite(sb) || !(sb > sa)) {
    throw DomainError("degenerate exit window");
  }
  return (s.value(x) - sa) / (sb - sa);
}

namespace {

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

std::string abs_band(double half_width) {
  return "|obs - ref| <= " + format_double(half_width);
}

TestReport within(std::string name, double observed, double reference,
                  double half_width, Provenance p) {
  return TestReport{std::move(name), observed, reference, p, abs_band(half_width),
                    std::abs(observed - reference) <= half_width};
}

double pair_se(double p1, double p2, std::size_t n) {
  double nn = static_cast<double>(n);
  return std::sqrt((p1 * (1 - p1) + p2 * (1 - p2)) / nn);
}

// Exact exit probabilities are compared with this tolerance to decide whether
// two members are analytically the same.
constexpr double kSameProbability = 1e-12;

}  // namespace

WindowValidation validate_window(const ExitExperiment& exp) {
  WindowValidation v;
  const Window& w = exp.window;
  if (exp.family.size() < 2) {
    v.reason = "family needs at least two specs";
    return v;
  }
  if (exp.n_paths == 0) {
    v.reason = "n_paths must be positive";
    return v;
  }
  std::vector<double> p;
  for (const auto& spec : exp.family) {
    try {
      p.push_back(exit_probability(spec, w.a, w.x, w.b));
    } catch (const Error& e) {
      v.reason = spec.name + ": " + e.what();
      return v;
    }
  }
  v.min_separation = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = i + 1; j < p.size(); ++j) {
      double d = std::abs(p[i] - p[j]);
      if (d <= kSameProbability) continue;
      double se = pair_se(p[i], p[j], exp.n_paths);
      v.min_separation = std::min(v.min_separation, d / se);
    }
  }
  v.approved = v.min_separation >= 5.0;
  if (!v.approved) {
    std::ostringstream os;
    os << "exit probabilities differ by only " << v.min_separation
       << " standard errors; widen the window or raise n_paths";
    v.reason = os.str();
  }
  return v;
}

double two_proportion_p(std::size_t k1, std::size_t n1, std::size_t k2, std::size_t n2) {
  if (n1 == 0 || n2 == 0) throw InvalidArgument("empty sample");
  double p1 = static_cast<double>(k1) / n1;
  double p2 = static_cast<double>(k2) / n2;
  double pool = static_cast<double>(k1 + k2) / (n1 + n2);
  double se = std::sqrt(pool * (1 - pool) * (1.0 / n1 + 1.0 / n2));
  if (se == 0) return p1 == p2 ? 1.0 : 0.0;
  return 2.0 * normal_sf(std::abs(p1 - p2) / se);
}

namespace {

ChainModel window_chain(const DiffusionSpec& spec, const Window& w) {
  return build_chain(spec, make_grid(spec, w.a, w.b, (w.b - w.a) / 8.0, {w.x}));
}

}  // namespace

std::vector<TestReport> distinctness_test(const ExitExperiment& exp) {
  WindowValidation v = validate_window(exp);
  if (!v.approved) throw ConfigError("window validator: " + v.reason);
  const Window& w = exp.window;
  std::vector<std::size_t> hits;
  std::vector<double> exact;
  for (std::size_t i = 0; i < exp.family.size(); ++i) {
    ChainModel c = window_chain(exp.family[i], w);
    auto h = simulate_exits(c, w.a, w.x, w.b, exp.n_paths, exp.seed,
                            static_cast<std::uint64_t>(i) << 40, exp.parallel);
    hits.push_back(std::accumulate(h.begin(), h.end(), std::size_t{0}));
    exact.push_back(exit_probability(exp.family[i], w.a, w.x, w.b));
  }
  std::vector<TestReport> out;
  std::string level = format_double(exp.level);
  for (std::size_t i = 0; i < hits.size(); ++i) {
    for (std::size_t j = i + 1; j < hits.size(); ++j) {
      double p = two_proportion_p(hits[i], exp.n_paths, hits[j], exp.n_paths);
      bool same = std::abs(exact[i] - exact[j]) <= kSameProbability;
      TestReport r;
      r.name = "distinct[" + exp.family[i].name + "," + exp.family[j].name + "]";
      r.observed = p;
      r.reference = exp.level;
      r.provenance = Provenance::PublishedResult;
      if (same) {
        r.name = "indistinct[" + exp.family[i].name + "," + exp.family[j].name + "]";
        r.provenance = Provenance::Definitional;
        r.band = "p >= " + level;
        r.pass = p >= exp.level;
      } else {
        r.band = "p < " + level;
        r.pass = p < exp.level;
      }
      out.push_back(r);
    }
  }
  return out;
}

ChainGrid path_test_grid(const DiffusionSpec& spec, const PathTestConfig& cfg) {
  Interval I = spec.interval();
  double lo = cfg.x_start - cfg.reach;
  double hi = cfg.x_start + cfg.reach;
  if (std::isfinite(I.lo)) lo = std::max(lo, I.lo + 1e-9 * std::max(1.0, std::abs(I.lo)));
  if (std::isfinite(I.hi)) hi = std::min(hi, I.hi - 1e-9 * std::max(1.0, std::abs(I.hi)));
  std::vector<double> req{cfg.x_start};
  if (const auto* k = spec.scale->singular()) {
    auto [klo, khi] = k->hull();
    if (klo > lo && klo < hi) req.push_back(klo);
    if (khi > lo && khi < hi) req.push_back(khi);
  }
  return make_grid(spec, lo, hi, cfg.spacing, req);
}

namespace {

SimConfig sim_config(const PathTestConfig& cfg) {
  SimConfig s;
  s.horizon = cfg.horizon;
  s.paths = cfg.paths;
  s.seed = cfg.seed;
  s.stream_base = cfg.stream_base;
  s.parallel = cfg.parallel;
  return s;
}

struct Moments {
  double mean = 0.0;
  double sd = 0.0;
};

template <class F>
Moments moments(const std::vector<PathSummary>& v, F&& f) {
  double n = static_cast<double>(v.size());
  double m = 0.0;
  for (const auto& p : v) m += f(p);
  m /= n;
  double ss = 0.0;
  for (const auto& p : v) ss += (f(p) - m) * (f(p) - m);
  return {m, std::sqrt(ss / std::max(1.0, n - 1))};
}

}  // namespace

TestReport qv_test(const DiffusionSpec& spec, const PathTestConfig& cfg) {
  if (!spec.speed.is_energy_measure() && !speed_matches_energy(spec)) {
    throw HypothesisFailure("m = m~", "qv_test needs the speed measure to equal m~");
  }
  ChainModel c = build_chain(spec, path_test_grid(spec, cfg));
  BatchResult r = simulate_chain(c, cfg.x_start, sim_config(cfg));
  Moments q = moments(r.summaries, [](const PathSummary& p) { return p.qv; });
  return TestReport{"qv[" + spec.name + "]", q.mean, cfg.horizon,
                    Provenance::Definitional, "rel 0.02",
                    std::abs(q.mean / cfg.horizon - 1.0) <= 0.02};
}

std::vector<TestReport> drift_consistency_test(const DiffusionSpec& spec,
                                               const DiffusionSpec& coefficients,
                                               const PathTestConfig& cfg) {
  DriftResult d = drift_b(coefficients);
  if (!d.is_function) {
    throw HypothesisFailure("H4", "drift is not a function for " + coefficients.name);
  }
  ChainModel c = build_chain(spec, path_test_grid(spec, cfg));
  attach_coefficients(c, spec, smooth_measure_N(coefficients), m_tilde(coefficients));
  BatchResult r = simulate_chain(c, cfg.x_start, sim_config(cfg));
  Moments res = moments(r.summaries, [](const PathSummary& p) { return p.residual; });
  Moments rqv = moments(r.summaries, [](const PathSummary& p) { return p.residual_qv; });
  Moments s2 = moments(r.summaries, [](const PathSummary& p) { return p.sigma2_time; });
  double se = res.sd / std::sqrt(static_cast<double>(cfg.paths));
  std::string tag = "[" + spec.name + "|" + coefficients.name + "]";
  std::vector<TestReport> out;
  out.push_back(within("drift.mean_residual" + tag, res.mean, 0.0, 3.0 * se,
                       Provenance::PublishedResult));
  double ratio = rqv.mean / s2.mean;
  out.push_back(TestReport{"drift.residual_qv_ratio" + tag, ratio, 1.0,
                           Provenance::PublishedResult, "rel 0.05",
                           std::abs(ratio - 1.0) <= 0.05});
  return out;
}

std::vector<TestReport> drift_consistency_test(const DiffusionSpec& spec,
                                               const PathTestConfig& cfg) {
  return drift_consistency_test(spec, spec, cfg);
}

std::vector<TestReport> skew_localtime_test(double alpha, const PathTestConfig& cfg) {
  if (!(alpha > 0 && alpha < 1)) throw InvalidArgument("alpha must be in (0, 1)");
  SimConfig sc = sim_config(cfg);
  BatchResult r = simulate_skew_bm(alpha, 0.0, sc, cfg.spacing);
  Moments m = moments(r.summaries, [](const PathSummary& p) { return p.final_state; });
  double se = m.sd / std::sqrt(static_cast<double>(cfg.paths));
  double ref = (1.0 - 2.0 * alpha) * std::sqrt(2.0 * cfg.horizon / M_PI);
  char buf[48];
  std::snprintf(buf, sizeof buf, "[alpha=%g]", alpha);
  std::string tag = buf;
  std::vector<TestReport> out;
  out.push_back(within("skew.mean_displacement" + tag, m.mean, ref, 3.0 * se,
                       Provenance::PublishedResult));
  if (alpha != 0.5) {
    double z = m.mean / se * (alpha < 0.5 ? 1.0 : -1.0);
    out.push_back(TestReport{"skew.sign_z" + tag, z, 2.326, Provenance::ClosedForm,
                             "obs >= 2.326", z >= 2.326});
  }
  return out;
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw InvalidArgument("ks_two_sample needs nonempty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double na = static_cast<double>(a.size());
  double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(i / na - j / nb));
  }
  double ne = std::sqrt(na * nb / (na + nb));
  double lambda = (ne + 0.12 + 0.11 / ne) * d;
  double p = 1.0;
  if (lambda > 1e-3) {
    double sum = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 200; ++k) {
      double term = std::exp(-2.0 * k * k * lambda * lambda);
      sum += sign * term;
      if (term < 1e-16) break;
      sign = -sign;
    }
    p = std::clamp(2.0 * sum, 0.0, 1.0);
  }
  return {d, p};
}

TestReport exit_law_test(const DiffusionSpec& spec, const Window& w,
                         std::size_t paths, std::uint64_t seed, bool parallel) {
  double p = exit_probability(spec, w.a, w.x, w.b);
  ChainModel c = window_chain(spec, w);
  auto h = simulate_exits(c, w.a, w.x, w.b, paths, seed, 0, parallel);
  double f = static_cast<double>(std::accumulate(h.begin(), h.end(), std::size_t{0})) /
             static_cast<double>(paths);
  double band = 3.0 * std::sqrt(p * (1 - p) / static_cast<double>(paths));
  std::ostringstream name;
  name.precision(6);
  name << "exit[" << spec.name << ";" << w.a << "," << w.x << "," << w.b << "]";
  return within(name.str(), f, p, band, Provenance::ClosedForm);
}

std::vector<Window> random_windows(const DiffusionSpec& spec, std::size_t count,
                                   std::uint64_t seed) {
  Interval pw = probe_window(*spec.scale);
  Rng rng(seed, 0x3e17);
  const auto* k = spec.scale->singular();
  std::vector<Window> out;
  while (out.size() < count) {
    double a, b;
    if (k && out.size() % 2 == 1) {
      // Every other window straddles the singular part.
      auto [klo, khi] = k->hull();
      double reach = std::max(khi - klo, 0.05 * pw.length());
      a = std::max(pw.lo, klo - reach * rng.uniform_open());
      b = std::min(pw.hi, khi + reach * rng.uniform_open());
    } else {
      a = pw.lo + pw.length() * rng.uniform();
      b = pw.lo + pw.length() * rng.uniform();
      if (a > b) std::swap(a, b);
    }
    if (b - a < 0.05 * pw.length()) continue;
    double x = a + (b - a) * (0.1 + 0.8 * rng.uniform());
    out.push_back(Window{a, x, b});
  }
  return out;
}

}  // namespace scalesim
