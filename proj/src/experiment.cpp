#include "scalesim/experiment.hpp"

#include <optional>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "scalesim/document.hpp"
#include "scalesim/errors.hpp"
#include "scalesim/format.hpp"
#include "scalesim/rng.hpp"

namespace scalesim {

namespace fs = std::filesystem;

DiffusionSpec build_spec(const SpecBlock& b) {
  if (b.kind == "brownian") {
    return make_spec("brownian", identity_scale(), SpeedMeasure::lebesgue());
  }
  if (b.kind == "cantor") {
    GeneralizedCantorSpec g;
    g.depth = b.depth;
    g.removal = RemovalRule::geometric(b.removal_scale, b.removal_ratio);
    CantorScale c = build_cantor_scale(g);
    return make_spec("cantor", c.scale, SpeedMeasure::energy(c.scale));
  }
  if (b.kind == "staircase") {
    CantorScale c = build_devils_staircase_scale(b.staircase_depth);
    return make_spec("staircase", c.scale, SpeedMeasure::energy(c.scale));
  }
  if (b.kind == "orey") {
    Drift d = b.drift == "zero"       ? Drift::zero()
              : b.drift == "constant" ? Drift::constant(b.drift_param)
              : b.drift == "sine"     ? Drift::sine(b.drift_param)
                                      : Drift::linear(b.drift_param);
    OreyModel o = build_orey_scale(d);
    return make_spec("orey", o.scale, o.speed);
  }
  if (b.kind == "skew") return skew_bm_spec(b.alpha);
  throw ConfigError("spec.kind: unknown kind '" + b.kind + "'");
}

DiffusionSpec bundled_spec(const std::string& name) {
  SpecBlock b;
  b.kind = name;
  return build_spec(b);
}

std::vector<DiffusionSpec> build_family(const DiffusionSpec& base,
                                        const std::vector<double>& fractions) {
  const auto* k = base.scale->singular();
  if (!k) throw ConfigError("spec.family: this scale has no singular part");
  double kappa = k->total_mass();
  std::vector<DiffusionSpec> out;
  for (double f : fractions) {
    out.push_back(make_spec(base.name + "@" + format_double(f),
                            subspace_scale(base.scale, f * kappa), base.speed));
  }
  return out;
}

namespace {

// Stream bases keep the random streams of different tests and members apart.
std::uint64_t stream(std::uint64_t test, std::uint64_t member) {
  return (test << 48) | (member << 40);
}

PathTestConfig path_config(const ExperimentConfig& c, std::uint64_t stream_base) {
  PathTestConfig p;
  p.x_start = c.sim.x_start;
  p.horizon = c.sim.horizon;
  p.paths = c.sim.paths;
  p.seed = c.seed;
  p.stream_base = stream_base;
  p.reach = c.sim.reach;
  p.spacing = c.sim.spacing;
  return p;
}

bool wants(const ExperimentConfig& c, const std::string& name) {
  return std::find(c.tests.names.begin(), c.tests.names.end(), name) != c.tests.names.end();
}

class Outputs {
 public:
  Outputs(const ExperimentConfig& c, RunResult& r) : dir_(c.out_dir), r_(r) {
    meta_.spec_hash = hex64(fnv1a(c.canonical_spec));
    meta_.seed = c.seed;
    meta_.extra.emplace_back("experiment", c.name);
    fs::create_directories(dir_);
  }
  const CsvMeta& meta() const { return meta_; }
  std::ofstream open(const std::string& name) {
    std::ofstream f(dir_ / name, std::ios::binary);
    if (!f) throw RuntimeError("cannot write " + (dir_ / name).string());
    r_.files.push_back(name);
    return f;
  }

 private:
  fs::path dir_;
  RunResult& r_;
  CsvMeta meta_;
};

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return x;
}

std::vector<TestReport> coefficient_invariance(const std::vector<DiffusionSpec>& fam,
                                               std::size_t probes, std::uint64_t seed) {
  Interval w = probe_window(*fam.front().scale);
  Rng rng(seed, stream(1, 0));
  std::vector<double> xs(probes);
  for (double& x : xs) x = w.lo + w.length() * rng.uniform_open();
  auto b0 = drift_b(fam.front());
  auto s0 = sigma(fam.front());
  if (!b0.is_function) throw HypothesisFailure("H4", "drift is not a function");
  double db = 0.0, ds = 0.0;
  for (std::size_t i = 1; i < fam.size(); ++i) {
    auto bi = drift_b(fam[i]);
    auto si = sigma(fam[i]);
    if (!bi.is_function) throw HypothesisFailure("H4", "drift is not a function");
    for (double x : xs) {
      db = std::max(db, std::abs(bi.b(x) - b0.b(x)));
      ds = std::max(ds, std::abs(si(x) - s0(x)));
    }
  }
  const std::string band = "|obs - ref| <= 1e-08";
  return {TestReport{"coef.b_sup_diff", db, 0.0, Provenance::PublishedResult, band, db <= 1e-8},
          TestReport{"coef.sigma_sup_diff", ds, 0.0, Provenance::PublishedResult, band,
                     ds <= 1e-8}};
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& c, std::ostream& log) {
  RunResult result;
  Outputs out(c, result);
  auto& reports = result.reports;

  DiffusionSpec base = build_spec(c.spec);
  std::vector<DiffusionSpec> family =
      c.spec.family.empty() ? std::vector<DiffusionSpec>{base} : build_family(base, c.spec.family);
  log << "spec " << base.name << ", " << family.size() << " member(s), seed " << c.seed << '\n';

  {
    auto f = out.open("hypotheses.txt");
    f << "# spec_hash=" << out.meta().spec_hash << " seed=" << c.seed
      << " version=" << kVersion << " grammar=" << kConfigGrammar << '\n';
    for (const auto& m : family) {
      HypothesisReport h = validate_hypotheses(m, c.seed);
      write_hypothesis_report(f, m.name, h);
      if (!h.h1.holds()) throw HypothesisFailure("H1", m.name + ": " + h.h1.witness);
    }
  }

  {
    Interval w = probe_window(*base.scale);
    auto x = linspace(w.lo, w.hi, 401);
    std::vector<std::string> names;
    std::vector<std::vector<double>> ys;
    for (const auto& m : family) {
      names.push_back("s[" + m.name + "]");
      std::vector<double> y;
      for (double xi : x) y.push_back(m.scale->value(xi));
      ys.push_back(std::move(y));
    }
    auto f = out.open("plot_scale.csv");
    write_xy(f, "x", names, x, ys, out.meta());
  }

  {
    log << "simulating " << c.sim.paths << " paths\n";
    PathTestConfig p = path_config(c, stream(0, 0));
    ChainModel chain = build_chain(base, path_test_grid(base, p));
    SimConfig s;
    s.horizon = c.sim.horizon;
    s.paths = c.sim.paths;
    s.seed = c.seed;
    s.record_paths = c.sim.record_paths;
    BatchResult r = simulate_chain(chain, c.sim.x_start, s);
    auto f = out.open("paths.csv");
    write_path_summaries(f, r.summaries, out.meta());
    auto g = out.open("trajectories.csv");
    write_path_samples(g, r.recorded, out.meta());

    double qmax = 0.0;
    for (const auto& ps : r.summaries) qmax = std::max(qmax, ps.qv);
    const std::size_t bins = 40;
    double width = qmax > 0 ? qmax / bins : 1.0;
    std::vector<double> centers(bins), counts(bins, 0.0);
    for (std::size_t i = 0; i < bins; ++i) centers[i] = (i + 0.5) * width;
    for (const auto& ps : r.summaries) {
      counts[std::min(bins - 1, static_cast<std::size_t>(ps.qv / width))] += 1.0;
    }
    auto h = out.open("plot_qv_hist.csv");
    write_xy(h, "qv", {"count"}, centers, {counts}, out.meta());
  }

  if (wants(c, "coefficients") && family.size() > 1) {
    log << "coefficient invariance\n";
    auto r = coefficient_invariance(family, c.tests.probes, c.seed);
    reports.insert(reports.end(), r.begin(), r.end());
  }
  if (wants(c, "qv")) {
    log << "quadratic variation\n";
    for (std::size_t i = 0; i < family.size(); ++i) {
      reports.push_back(qv_test(family[i], path_config(c, stream(2, i))));
    }
  }
  if (wants(c, "drift")) {
    log << "drift consistency\n";
    for (std::size_t i = 0; i < family.size(); ++i) {
      auto r = drift_consistency_test(family[i], base, path_config(c, stream(3, i)));
      reports.insert(reports.end(), r.begin(), r.end());
    }
  }
  if (wants(c, "distinctness")) {
    log << "distinctness\n";
    ExitExperiment e;
    e.family = family;
    e.window = c.tests.window;
    e.n_paths = c.tests.exit_events;
    e.seed = c.seed;
    e.level = c.tests.level;
    auto r = distinctness_test(e);
    reports.insert(reports.end(), r.begin(), r.end());
  }
  if (wants(c, "exit_law")) {
    log << "exit law\n";
    std::vector<double> idx, emp, exact;
    for (std::size_t i = 0; i < family.size(); ++i) {
      auto windows = random_windows(family[i], c.tests.windows, c.seed + i);
      std::size_t inside = 0;
      for (std::size_t j = 0; j < windows.size(); ++j) {
        TestReport r = exit_law_test(family[i], windows[j], c.sim.paths,
                                     c.seed ^ stream(4, i) ^ j);
        inside += r.pass ? 1 : 0;
        idx.push_back(static_cast<double>(idx.size()));
        emp.push_back(r.observed);
        exact.push_back(r.reference);
      }
      std::size_t need = windows.size() - windows.size() / 10;
      reports.push_back(TestReport{"exit_law[" + family[i].name + "]",
                                   static_cast<double>(inside),
                                   static_cast<double>(windows.size()),
                                   Provenance::ClosedForm,
                                   "obs >= " + std::to_string(need), inside >= need});
    }
    auto f = out.open("plot_exit.csv");
    write_xy(f, "window", {"empirical", "exact"}, idx, {emp, exact}, out.meta());
  }
  if (wants(c, "skew")) {
    log << "skew displacement\n";
    std::vector<double> alphas = c.tests.alphas;
    if (alphas.empty()) alphas.push_back(c.spec.alpha);
    std::vector<double> obs, ref;
    for (std::size_t i = 0; i < alphas.size(); ++i) {
      PathTestConfig p = path_config(c, stream(5, i));
      p.x_start = 0.0;
      auto r = skew_localtime_test(alphas[i], p);
      obs.push_back(r.front().observed);
      ref.push_back(r.front().reference);
      reports.insert(reports.end(), r.begin(), r.end());
    }
    auto f = out.open("plot_skew.csv");
    write_xy(f, "alpha", {"mean_displacement", "exact"}, alphas, {obs, ref}, out.meta());
  }
  if (wants(c, "ks")) {
    log << "marginal ks\n";
    std::vector<std::vector<double>> samples;
    for (std::size_t i : {std::size_t{0}, family.size() - 1}) {
      PathTestConfig p = path_config(c, stream(6, i));
      ChainModel chain = build_chain(family[i], path_test_grid(family[i], p));
      SimConfig s;
      s.horizon = p.horizon;
      s.paths = p.paths;
      s.seed = p.seed;
      s.stream_base = p.stream_base;
      BatchResult r = simulate_chain(chain, p.x_start, s);
      std::vector<double> v;
      for (const auto& ps : r.summaries) v.push_back(ps.final_state);
      samples.push_back(std::move(v));
    }
    KsResult k = ks_two_sample(samples[0], samples[1]);
    reports.push_back(TestReport{"ks[" + family.front().name + "," + family.back().name + "]",
                                 k.p_value, c.tests.level, Provenance::PublishedResult,
                                 "p < " + format_double(c.tests.level),
                                 k.p_value < c.tests.level});
  }

  {
    auto f = out.open("tests.txt");
    write_reports_table(f, reports);
    auto g = out.open("tests.csv");
    write_reports_csv(g, reports, out.meta());
  }
  return result;
}

void describe_experiment(const ExperimentConfig& c, std::ostream& os) {
  DiffusionSpec base = build_spec(c.spec);
  os << "spec: " << base.name << "\n";
  os << "spec_hash: " << hex64(fnv1a(c.canonical_spec)) << "\n";
  Interval I = base.interval();
  os << "interval: (" << format_double(I.lo) << ", " << format_double(I.hi) << ")\n";
  for (const auto& [k, v] : base.scale->describe()) os << "scale." << k << ": " << v << "\n";
  for (const auto& [k, v] : base.speed.describe()) os << "speed." << k << ": " << v << "\n";
  const auto* kappa = base.scale->singular();
  os << "kappa_mass: " << format_double(kappa ? kappa->total_mass() : 0.0) << "\n";
  HypothesisReport h = validate_hypotheses(base, c.seed);
  for (const auto& [k, v] : h.records()) os << "hypothesis." << k << ": " << v << "\n";

  if (c.spec.kind == "brownian") {
    os << "b: 0 (closed-form)\nsigma: 1 (closed-form)\n";
  } else if (c.spec.kind == "orey") {
    os << "sigma: 1 (closed-form)\nb: " << c.spec.drift << "(" << format_double(c.spec.drift_param)
       << ") (closed-form)\n";
  }
  std::optional<DriftResult> d;
  if (h.h4.holds()) d = drift_b(base);
  Coefficient sg = sigma(base);
  Interval w = probe_window(*base.scale);
  for (double x : linspace(w.lo, w.hi, 5)) {
    os << "at x=" << format_double(x) << ": sigma=" << format_double(sg(x));
    if (d && d->is_function) os << " b=" << format_double(d->b(x));
    os << "\n";
  }
  if (!d) os << "b: undefined (H4 fails)\n";
  else if (!d->is_function) os << "b: measure with atoms (no drift function)\n";
  for (bool upper : {false, true}) {
    BoundaryReport br = classify_boundary(base, upper);
    os << "boundary." << (upper ? "upper" : "lower") << ": " << to_string(br.kind) << " ("
       << br.witness << ")\n";
  }
  if (c.tests.has_window) {
    const Window& win = c.tests.window;
    std::vector<DiffusionSpec> fam =
        c.spec.family.empty() ? std::vector<DiffusionSpec>{base} : build_family(base, c.spec.family);
    for (const auto& m : fam) {
      os << "exit_probability[" << m.name << "](" << format_double(win.a) << ", "
         << format_double(win.x) << ", " << format_double(win.b)
         << "): " << format_double(exit_probability(m, win.a, win.x, win.b)) << "\n";
    }
  }
}

}  // namespace scalesim
