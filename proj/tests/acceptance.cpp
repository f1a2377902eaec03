// Acceptance run: one PASS/FAIL line per criterion, details indented below it.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "scalesim/config.hpp"
#include "scalesim/experiment.hpp"
#include "scalesim/rng.hpp"
#include "scalesim/verify.hpp"

using namespace scalesim;
namespace fs = std::filesystem;

namespace {

constexpr double kP0 = 1.0 / 56;
const Window kWindow{-0.125, 0.0, kP0 + 0.125};

struct Criterion {
  bool pass = true;
  std::vector<std::string> lines;

  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    lines.push_back(std::string(ok ? "ok   " : "MISS ") + what);
  }
  void report(const TestReport& r) {
    std::ostringstream os;
    os.precision(6);
    os << r.name << " observed=" << r.observed << " reference=" << r.reference << " ["
       << r.band << ", " << to_string(r.provenance) << "]";
    check(r.pass, os.str());
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

void print(int n, const char* title, const Criterion& c, double secs) {
  std::printf("criterion %d: %s  %s (%.1f s)\n", n, c.pass ? "PASS" : "FAIL", title, secs);
  for (const auto& l : c.lines) std::printf("    %s\n", l.c_str());
  std::fflush(stdout);
}

const DiffusionSpec& cantor() {
  static const DiffusionSpec s = bundled_spec("cantor");
  return s;
}

std::vector<DiffusionSpec> cantor_family() {
  return build_family(cantor(), {0.0, 0.25, 0.5, 1.0});
}

bool criterion1() {
  auto t0 = std::chrono::steady_clock::now();
  Criterion c;
  auto fam = cantor_family();

  Interval w = probe_window(*cantor().scale);
  Rng rng(2024, 1);
  std::vector<double> probes(1000);
  for (double& x : probes) x = w.lo + w.length() * rng.uniform_open();
  auto b0 = drift_b(fam[0]);
  auto s0 = sigma(fam[0]);
  double db = 0, ds = 0;
  for (std::size_t i = 1; i < fam.size(); ++i) {
    auto bi = drift_b(fam[i]);
    auto si = sigma(fam[i]);
    for (double x : probes) {
      db = std::max(db, std::abs(bi.b(x) - b0.b(x)));
      ds = std::max(ds, std::abs(si(x) - s0(x)));
    }
  }
  c.check(db <= 1e-8, "(a) sup |b_c - b_0| = " + fmt("%.3g", db) + " <= 1e-8");
  c.check(ds <= 1e-8, "(a) sup |sigma_c - sigma_0| = " + fmt("%.3g", ds) + " <= 1e-8");

  for (std::size_t i = 0; i < fam.size(); ++i) {
    PathTestConfig p;
    p.paths = 10000;
    p.seed = 31;
    p.stream_base = i << 40;
    for (const auto& r : drift_consistency_test(fam[i], cantor(), p)) c.report(r);
  }

  ExitExperiment e;
  e.family = fam;
  e.window = kWindow;
  e.n_paths = 100000;
  e.seed = 32;
  WindowValidation v = validate_window(e);
  c.check(v.approved, "(c) window approved, min separation " + fmt("%.1f", v.min_separation) + " SE");
  for (const auto& r : distinctness_test(e)) c.report(r);

  double secs = seconds_since(t0);
  c.check(secs <= 300, "runtime " + fmt("%.1f", secs) + " s <= 300 s");
  print(1, "fat Cantor family: same coefficients, drift-consistent, distinct laws", c, secs);
  return c.pass;
}

bool criterion2() {
  auto t0 = std::chrono::steady_clock::now();
  Criterion c;
  std::vector<DiffusionSpec> specs{bundled_spec("brownian"), bundled_spec("staircase"),
                                   bundled_spec("skew"), bundled_spec("orey")};
  for (auto& m : cantor_family()) specs.push_back(m);
  for (std::size_t i = 0; i < specs.size(); ++i) {
    auto ts = std::chrono::steady_clock::now();
    PathTestConfig p;
    p.paths = 10000;
    p.seed = 41;
    p.stream_base = i << 40;
    TestReport r = qv_test(specs[i], p);
    double secs = seconds_since(ts);
    c.report(r);
    c.check(secs <= 60, "  runtime " + fmt("%.1f", secs) + " s <= 60 s");
  }
  print(2, "realized QV over [0,1] within 2% of 1 when m = m~", c, seconds_since(t0));
  return c.pass;
}

bool criterion3() {
  auto t0 = std::chrono::steady_clock::now();
  Criterion c;
  std::uint64_t seed = 51;
  for (const char* name : {"brownian", "cantor", "staircase", "skew"}) {
    DiffusionSpec spec = bundled_spec(name);
    auto windows = random_windows(spec, 20, seed++);
    int inside = 0;
    std::size_t j = 0;
    for (const auto& w : windows) inside += exit_law_test(spec, w, 10000, 1000 * seed + j++).pass;
    c.check(inside >= 18, std::string(name) + ": " + std::to_string(inside) +
                              "/20 windows inside the 3 sigma band (need 18)");
  }
  print(3, "exit frequencies against (s(x)-s(a))/(s(b)-s(a))", c, seconds_since(t0));
  return c.pass;
}

bool criterion4() {
  auto t0 = std::chrono::steady_clock::now();
  Criterion c;
  for (double alpha : {0.2, 0.8}) {
    auto mu = smooth_measure_N(skew_bm_spec(alpha));
    bool one = mu.atoms().size() == 1 && mu.atoms()[0].x == 0.0;
    double mass = one ? mu.atoms()[0].mass : NAN;
    bool no_density = mu.mass(-10, -1e-12) == 0.0 && mu.mass(1e-12, 10) == 0.0;
    c.check(one && no_density && std::abs(mass - 0.5 * (1 - 2 * alpha)) <= 1e-14,
            "(i) alpha=" + fmt("%.1f", alpha) + ": single atom at 0 of mass " + fmt("%.17g", mass));
  }
  for (double alpha : {0.2, 0.5, 0.8}) {
    PathTestConfig p;
    p.paths = 100000;
    p.seed = 61;
    p.spacing = 0.02;
    c.report(skew_localtime_test(alpha, p).front());
  }
  {
    SimConfig s;
    s.paths = 10000;
    s.seed = 62;
    auto skew = simulate_skew_bm(0.5, 0.0, s, 0.02);
    auto bm = bundled_spec("brownian");
    auto chain = build_chain(bm, make_grid(bm, -10, 10, 0.02, {0.0}));
    s.stream_base = 1ULL << 40;
    auto ref = simulate_chain(chain, 0.0, s);
    std::vector<double> a, b;
    for (const auto& x : skew.summaries) a.push_back(x.final_state);
    for (const auto& x : ref.summaries) b.push_back(x.final_state);
    KsResult k = ks_two_sample(a, b);
    c.check(k.p_value > 0.01, "(iii) alpha=0.5 vs brownian marginal at T=1: KS p = " +
                                  fmt("%.4g", k.p_value) + " > 0.01");
  }
  print(4, "skew Brownian motion: atom, mean displacement, alpha = 1/2", c, seconds_since(t0));
  return c.pass;
}

bool criterion5() {
  auto t0 = std::chrono::steady_clock::now();
  Criterion c;
  auto pattern = [](const HypothesisReport& r) {
    auto v = [](const HypothesisEntry& e) { return to_string(e.verdict); };
    return std::string("H1 ") + v(r.h1) + ", H2 " + v(r.h2) + ", H3 " + v(r.h3) + ", H4 " +
           v(r.h4) + ", H4' " + v(r.h4prime);
  };
  auto bm = validate_hypotheses(bundled_spec("brownian"));
  c.check(bm.h1.holds() && bm.h2.verdict == Verdict::Fails, "brownian: " + pattern(bm));
  for (double beta : {0.5, 1.0}) {
    auto o = build_orey_scale(Drift::constant(beta));
    auto r = validate_hypotheses(make_spec("orey", o.scale, o.speed));
    c.check(r.h1.holds() && r.h2.verdict == Verdict::Fails && r.m_equals_m_tilde,
            "orey(" + fmt("%.1f", beta) + "): " + pattern(r) + ", m = m~ " +
                (r.m_equals_m_tilde ? "yes" : "no"));
  }
  auto ca = validate_hypotheses(cantor());
  c.check(ca.h1.holds() && ca.h2.holds() && ca.h3.holds() && ca.h4.holds() && ca.h4prime.holds(),
          "cantor: " + pattern(ca));
  auto st = validate_hypotheses(bundled_spec("staircase"));
  c.check(st.h1.holds() && st.h2.holds() && st.h4.verdict == Verdict::Fails,
          "staircase: " + pattern(st));
  auto skew = bundled_spec("skew");
  auto sk = validate_hypotheses(skew);
  bool eq = check_h4prime_equivalence(skew);
  c.check(sk.h4.holds() && !eq, "skew: " + pattern(sk) + ", check_h4prime_equivalence = " +
                                    (eq ? "true" : "false"));
  print(5, "hypothesis validation patterns", c, seconds_since(t0));
  return c.pass;
}

std::vector<std::string> read_dir(const fs::path& d) {
  std::vector<std::string> out;
  for (const auto& e : fs::directory_iterator(d)) out.push_back(e.path().filename().string());
  std::sort(out.begin(), out.end());
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

bool criterion6() {
  auto t0 = std::chrono::steady_clock::now();
  Criterion c;
  double worst_b = 0;
  for (double beta : {-0.7, 0.5, 1.0}) {
    auto o = build_orey_scale(Drift::constant(beta));
    auto d = drift_b(make_spec("orey", o.scale, o.speed));
    for (double x = -3; x <= 3; x += 0.125) worst_b = std::max(worst_b, std::abs(d.b(x) - beta));
  }
  c.check(worst_b <= 1e-6, "orey b = beta recovered to " + fmt("%.3g", worst_b) + " <= 1e-6");
  {
    auto o = build_orey_scale(Drift::sine(1.0));
    auto d = drift_b(make_spec("orey", o.scale, o.speed));
    double worst = 0;
    for (double x = -3; x <= 3; x += 0.125) worst = std::max(worst, std::abs(d.b(x) - std::sin(x)));
    c.check(worst <= 1e-6, "orey b = sin x recovered to " + fmt("%.3g", worst) + " <= 1e-6");
  }
  {
    double worst = 0;
    Rng rng(71, 0);
    for (int i = 0; i < 2000; ++i) {
      double x = i % 2 ? kP0 * rng.uniform() : -3 + 6 * rng.uniform();
      worst = std::max(worst, std::abs(cantor().inverse(cantor().scale->value(x)) - x));
    }
    c.check(worst <= 1e-9, "fat Cantor t(s(x)) = x to " + fmt("%.3g", worst) + " <= 1e-9");
  }
  for (const char* name : {"cantor", "staircase"}) {
    AuditResult a = audit_decomposition(*bundled_spec(name).scale, 72, 500);
    c.check(a.worst_residual <= 1e-8, std::string(name) + ": decomposition residual " +
                                          fmt("%.3g", a.worst_residual) + " <= 1e-8");
  }
  {
    const char* text = R"(
[experiment]
name = determinism
seed = 73
[spec]
kind = cantor
family = 0, 1
[simulation]
paths = 1000
record_paths = 3
[tests]
run = hypotheses, coefficients, qv, drift, distinctness, exit_law
window = -0.125, 0, 0.14285714285714285
exit_events = 20000
windows = 4
probes = 100
)";
    fs::path base = fs::temp_directory_path() / "scalesim_acceptance";
    fs::remove_all(base);
    std::ostringstream log;
    for (const char* sub : {"a", "b"}) {
      auto cfg = parse_config(text, {std::string("output.dir=") + (base / sub).string()});
      run_experiment(cfg, log);
    }
    auto fa = read_dir(base / "a");
    auto fb = read_dir(base / "b");
    bool same = fa == fb && !fa.empty();
    for (const auto& f : fa) same = same && slurp(base / "a" / f) == slurp(base / "b" / f);
    c.check(same, "identical seeds give identical bytes in " + std::to_string(fa.size()) + " files");
    fs::remove_all(base);
  }
  print(6, "round trips and determinism", c, seconds_since(t0));
  return c.pass;
}

bool criterion7() {
  auto t0 = std::chrono::steady_clock::now();
  Criterion c;
  const int reps = 50;
  int rejections = 0;
  for (int i = 0; i < reps; ++i) {
    ExitExperiment e;
    e.family = {cantor(), cantor()};
    e.window = kWindow;
    e.n_paths = 100000;
    e.seed = 8000 + static_cast<std::uint64_t>(i);
    auto r = distinctness_test(e);
    if (r.front().observed < e.level) ++rejections;
  }
  double rate = static_cast<double>(rejections) / reps;
  c.check(rate <= 0.05, "{s, s}: " + std::to_string(rejections) + "/50 false rejections at 0.01 (rate " +
                            fmt("%.2f", rate) + " <= 0.05)");
  print(7, "no false distinctness for identical specs", c, seconds_since(t0));
  return c.pass;
}

}  // namespace

int main() {
  std::vector<std::function<bool()>> all{criterion1, criterion2, criterion3, criterion4,
                                         criterion5, criterion6, criterion7};
  int failed = 0;
  for (auto& f : all) {
    try {
      failed += f() ? 0 : 1;
    } catch (const std::exception& e) {
      std::printf("criterion: FAIL  error: %s\n", e.what());
      ++failed;
    }
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(all.size()) - failed, all.size());
  return failed == 0 ? 0 : 1;
}
