#include <cmath>

#include "doctest.h"
#include "scalesim/coefficients.hpp"
#include "scalesim/experiment.hpp"

using namespace scalesim;

namespace {

constexpr double kP0 = 1.0 / 56;

const DiffusionSpec& cantor() {
  static const DiffusionSpec s = bundled_spec("cantor");
  return s;
}

}  // namespace

TEST_CASE("brownian coefficients") {
  auto bm = bundled_spec("brownian");
  auto d = drift_b(bm);
  REQUIRE(d.is_function);
  CHECK(d.b(0.7) == 0.0);
  CHECK(sigma(bm)(-3.0) == doctest::Approx(1.0));
  CHECK(smooth_measure_N(bm).is_zero());
}

TEST_CASE("orey drift recovery") {
  for (double beta : {-0.5, 0.5, 1.0}) {
    auto o = build_orey_scale(Drift::constant(beta));
    auto spec = make_spec("orey", o.scale, o.speed);
    auto d = drift_b(spec);
    REQUIRE(d.is_function);
    for (double x : {-2.0, -0.3, 0.0, 0.8, 2.5}) CHECK(std::abs(d.b(x) - beta) <= 1e-6);
    CHECK(sigma(spec)(0.4) == doctest::Approx(1.0).epsilon(1e-6));
  }
  auto o = build_orey_scale(Drift::sine(1.0));
  auto d = drift_b(make_spec("orey", o.scale, o.speed));
  for (double x : {-2.0, -0.3, 0.0, 0.8, 2.5}) CHECK(std::abs(d.b(x) - std::sin(x)) <= 1e-6);
}

TEST_CASE("orey scale for constant drift") {
  // s' = exp(-2 beta x) anchored at 0
  auto o = build_orey_scale(Drift::constant(0.5));
  CHECK(o.scale->value(1.0) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-9));
  CHECK(o.scale->value(-1.0) == doctest::Approx(1.0 - std::exp(1.0)).epsilon(1e-9));
}

TEST_CASE("fat cantor drift outside the hull") {
  // x < 0: t'' = -1, g = (-2x)^(-1/2), h = (-2x)^(1/2), b = 1 / (4x)
  auto d = drift_b(cantor());
  REQUIRE(d.is_function);
  CHECK(d.b(-0.5) == doctest::Approx(-0.5).epsilon(1e-7));
  CHECK(d.b(-2.0) == doctest::Approx(-0.125).epsilon(1e-7));
  CHECK(d.b(kP0 + 0.25) == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(sigma(cantor())(-0.7) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(sigma(cantor())(0.3) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("drift measure mass on the left branch") {
  // density -1/2 (-2x)^(-1/2) integrated over (-1, -1/2]
  auto mu = smooth_measure_N(cantor());
  CHECK(mu.mass(-1.0, -0.5) == doctest::Approx(-(std::sqrt(2.0) - 1) / 2).epsilon(1e-9));
  CHECK(mu.atoms().empty());
}

TEST_CASE("energy measure equals the speed for m = m~") {
  CHECK(speed_matches_energy(cantor()));
  auto mt = m_tilde(cantor());
  // outside the hull t' o s(x) = sqrt(-2x)
  double exact = (std::pow(2.0, 1.5) - 1.0) / 3.0;  // int_{-1}^{-1/2} sqrt(-2x) dx
  CHECK(mt.mass(-1.0, -0.5) == doctest::Approx(exact).epsilon(1e-9));
}

TEST_CASE("skew drift is a single atom") {
  for (double alpha : {0.2, 0.5, 0.8}) {
    SpecBlock b;
    b.kind = "skew";
    b.alpha = alpha;
    auto sk = build_spec(b);
    auto mu = smooth_measure_N(sk);
    if (alpha == 0.5) {
      CHECK(mu.atoms().empty());
      continue;
    }
    REQUIRE(mu.atoms().size() == 1);
    CHECK(mu.atoms()[0].x == 0.0);
    CHECK(mu.atoms()[0].mass == doctest::Approx(0.5 * (1 - 2 * alpha)).epsilon(1e-14));
    CHECK(mu.mass(-5.0, -0.001) == 0.0);
    CHECK(mu.mass(0.001, 5.0) == 0.0);
    CHECK_FALSE(check_h4prime_equivalence(sk));
    CHECK_FALSE(drift_b(sk).is_function);
  }
}

TEST_CASE("hypothesis patterns") {
  auto bm = validate_hypotheses(bundled_spec("brownian"));
  CHECK(bm.h1.holds());
  CHECK(bm.h2.verdict == Verdict::Fails);

  auto o = build_orey_scale(Drift::constant(0.7));
  auto orey = make_spec("orey", o.scale, o.speed);
  auto ro = validate_hypotheses(orey);
  CHECK(ro.h1.holds());
  CHECK(ro.h2.verdict == Verdict::Fails);
  CHECK(ro.m_equals_m_tilde);

  auto c = validate_hypotheses(cantor());
  CHECK(c.h1.holds());
  CHECK(c.h2.holds());
  CHECK(c.h3.holds());
  CHECK(c.h4.holds());
  CHECK(c.h4prime.holds());

  auto st = validate_hypotheses(bundled_spec("staircase"));
  CHECK(st.h1.holds());
  CHECK(st.h2.holds());
  CHECK(st.h4.verdict == Verdict::Fails);

  auto sk = validate_hypotheses(bundled_spec("skew"));
  CHECK(sk.h4.holds());
}

TEST_CASE("boundary classification") {
  auto bm = bundled_spec("brownian");
  CHECK(classify_boundary(bm, false).kind == BoundaryKind::Unapproachable);
  CHECK(classify_boundary(bm, true).kind == BoundaryKind::Unapproachable);
  auto unit = make_spec("unit", identity_scale(Interval(0.0, 1.0)),
                        SpeedMeasure::lebesgue(Interval(0.0, 1.0)));
  CHECK(classify_boundary(unit, false).kind == BoundaryKind::Approachable);
  CHECK(classify_boundary(unit, true).kind == BoundaryKind::Approachable);
  auto o = build_orey_scale(Drift::constant(1.0));
  auto orey = make_spec("orey", o.scale, o.speed);
  CHECK(classify_boundary(orey, true).kind == BoundaryKind::Unapproachable);
}
