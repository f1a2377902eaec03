#include <cmath>

#include "doctest.h"
#include "scalesim/experiment.hpp"
#include "scalesim/rng.hpp"
#include "scalesim/verify.hpp"

using namespace scalesim;

TEST_CASE("exit probability oracles") {
  CHECK(exit_probability(bundled_spec("brownian"), -1, 0, 1) == doctest::Approx(0.5));
  for (double alpha : {0.3, 0.5, 0.7}) {
    CHECK(exit_probability(skew_bm_spec(alpha), -1, 0, 1) == doctest::Approx(1 - alpha));
  }
  CHECK(exit_probability(bundled_spec("staircase"), 0, 0.5, 1) == doctest::Approx(0.5));
  auto c = bundled_spec("cantor");
  auto fam = build_family(c, {0.0, 0.5, 1.0});
  for (std::size_t i = 0; i < fam.size(); ++i) {
    double cc = 0.25 * static_cast<double>(i);
    // s_c(-1/8) = -1/2, s_c(0) = 0, s_c(1/56 + 1/8) = 1 + c
    CHECK(exit_probability(fam[i], -0.125, 0.0, 1.0 / 56 + 0.125) ==
          doctest::Approx(0.5 / (1.5 + cc)).epsilon(1e-9));
  }
  CHECK_THROWS(exit_probability(c, 0.5, 0.0, 1.0));
}

TEST_CASE("two proportion test") {
  CHECK(two_proportion_p(500, 1000, 500, 1000) == doctest::Approx(1.0));
  CHECK(two_proportion_p(400, 1000, 600, 1000) < 1e-10);
  CHECK(two_proportion_p(100, 1000, 120, 1000) ==
        doctest::Approx(two_proportion_p(120, 1000, 100, 1000)));
}

TEST_CASE("ks statistic of identical samples") {
  std::vector<double> a{0.1, 0.4, 0.4, 2.0};
  KsResult r = ks_two_sample(a, a);
  CHECK(r.statistic == 0.0);
  CHECK(r.p_value == 1.0);
  CHECK_THROWS(ks_two_sample({}, a));
  // disjoint samples: D = 1
  CHECK(ks_two_sample({0, 1, 2}, {5, 6, 7}).statistic == 1.0);
}

TEST_CASE("ks calibration under the null") {
  int reject = 0;
  const int reps = 200;
  for (int s = 0; s < reps; ++s) {
    Rng ra(1000 + s, 0), rb(1000 + s, 1);
    std::vector<double> a(10000), b(10000);
    for (auto& x : a) x = ra.normal();
    for (auto& x : b) x = rb.normal();
    if (ks_two_sample(a, b).p_value < 0.05) ++reject;
  }
  double rate = static_cast<double>(reject) / reps;
  CHECK(rate >= 0.03);
  CHECK(rate <= 0.07);
}

TEST_CASE("window validator") {
  auto c = bundled_spec("cantor");
  ExitExperiment e;
  e.family = build_family(c, {0.0, 1.0});
  e.window = {-0.125, 0.0, 1.0 / 56 + 0.125};
  e.n_paths = 100000;
  CHECK(validate_window(e).approved);
  e.n_paths = 100;
  CHECK_FALSE(validate_window(e).approved);
  CHECK_THROWS_AS(distinctness_test(e), ConfigError);
  e.family = {c, c};
  CHECK(validate_window(e).approved);
}

TEST_CASE("identical family members are not separated") {
  auto bm = bundled_spec("brownian");
  ExitExperiment e;
  e.family = {bm, bm};
  e.window = {-1, 0, 1};
  e.n_paths = 20000;
  e.seed = 4;
  auto r = distinctness_test(e);
  REQUIRE(r.size() == 1);
  CHECK(r[0].pass);
  CHECK(r[0].provenance == Provenance::Definitional);
}

TEST_CASE("drift consistency for brownian motion") {
  PathTestConfig p;
  p.paths = 2000;
  auto r = drift_consistency_test(bundled_spec("brownian"), p);
  CHECK(all_pass(r));
}

TEST_CASE("qv test refuses a speed other than m~") {
  auto bm = bundled_spec("brownian");
  auto other = make_spec("bm2", identity_scale(),
                         SpeedMeasure::with_density(Interval::real_line(),
                                                    [](double) { return 2.0; }, true, "2 dx"));
  PathTestConfig p;
  p.paths = 100;
  CHECK_THROWS_AS(qv_test(other, p), HypothesisFailure);
  CHECK(qv_test(bm, p).reference == 1.0);
}

TEST_CASE("random windows stay inside the probe window") {
  auto c = bundled_spec("cantor");
  auto ws = random_windows(c, 20, 9);
  Interval pw = probe_window(*c.scale);
  REQUIRE(ws.size() == 20);
  for (const auto& w : ws) {
    CHECK(w.a < w.x);
    CHECK(w.x < w.b);
    CHECK(w.a >= pw.lo);
    CHECK(w.b <= pw.hi);
  }
}
