#include <cmath>

#include "doctest.h"
#include "scalesim/rng.hpp"
#include "scalesim/scale.hpp"

using namespace scalesim;

namespace {

const CantorScale& fat() {
  static const CantorScale c = build_cantor_scale({});
  return c;
}

constexpr double kP0 = 1.0 / 56;

}  // namespace

TEST_CASE("identity scale") {
  auto s = identity_scale();
  CHECK(s->value(2.5) == 2.5);
  CHECK(s->inverse(-1.25) == -1.25);
  CHECK(s->singular() == nullptr);
  CHECK(s->inverse_class() == InverseClass::Lipschitz);
}

TEST_CASE("fat cantor scale outside the singular hull") {
  const ScaleModel& s = *fat().scale;
  // t(z) = -z^2/2 for z < 0 and 1/56 + (z - 1)^2 / 2 for z > 1
  CHECK(s.value(-2.0) == doctest::Approx(-2.0));
  CHECK(s.value(-0.125) == doctest::Approx(-0.5));
  CHECK(s.value(kP0 + 0.5) == doctest::Approx(2.0));
  CHECK(s.value(kP0 + 0.125) == doctest::Approx(1.5));
  CHECK(s.value(0.0) == doctest::Approx(0.0));
  CHECK(s.value(kP0) == doctest::Approx(1.0));
}

TEST_CASE("fat cantor singular mass is one half") {
  const auto* k = fat().scale->singular();
  REQUIRE(k != nullptr);
  CHECK(k->total_mass() == doctest::Approx(0.5).epsilon(1e-12));
  auto [lo, hi] = k->hull();
  CHECK(lo == doctest::Approx(0.0));
  CHECK(hi == doctest::Approx(kP0));
}

TEST_CASE("inverse round trip to 1e-9") {
  const auto& c = fat();
  Rng rng(42, 0);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    double x = -3.0 + 6.0 * rng.uniform();
    if (i % 2) x = kP0 * rng.uniform();
    worst = std::max(worst, std::abs(c.inverse(c.scale->value(x)) - x));
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("decomposition audit") {
  AuditResult a = audit_decomposition(*fat().scale, 7, 200);
  CHECK(a.worst_excess <= 0.0);
  CHECK(a.worst_residual <= 1e-8);
  auto st = build_devils_staircase_scale(40);
  CHECK(audit_decomposition(*st.scale, 7, 200).worst_residual <= 1e-8);
}

TEST_CASE("devil's staircase values") {
  auto st = build_devils_staircase_scale(40);
  const ScaleModel& s = *st.scale;
  CHECK(s.value(2.0) == doctest::Approx(3.0));
  CHECK(s.value(-1.0) == doctest::Approx(-1.0));
  CHECK(s.value(0.5) == doctest::Approx(1.0));
  CHECK(s.value(1.0 / 3) == doctest::Approx(1.0 / 3 + 0.5));
  CHECK(st.inverse(3.0) == doctest::Approx(2.0));
  CHECK(s.inverse_class() == InverseClass::NotBoundedVariation);
}

TEST_CASE("skew scale is piecewise linear") {
  double alpha = 0.2;
  auto s = skew_scale(identity_scale(), 0.0, 1 / alpha, 1 / (1 - alpha));
  CHECK(s->value(-1.0) == doctest::Approx(-5.0));
  CHECK(s->value(1.0) == doctest::Approx(1.25));
  auto jumps = s->inverse_jumps();
  REQUIRE(jumps.size() == 1);
  // t' jumps from alpha to 1 - alpha at 0
  CHECK(jumps[0].state == 0.0);
  CHECK(jumps[0].jump == doctest::Approx(1 - 2 * alpha));
}

TEST_CASE("subspace family") {
  const auto& c = fat();
  const double kappa = 0.5;
  CHECK(subspace_half_width(c.scale, kappa) == doctest::Approx(kP0));
  for (double cc : {0.0, 0.125, 0.25, 0.5}) {
    auto sc = subspace_scale(c.scale, cc);
    // s_c = s - (kappa - c) to the right of the hull, s to the left
    CHECK(sc->value(-0.125) == doctest::Approx(-0.5));
    CHECK(sc->value(0.0) == doctest::Approx(0.0));
    CHECK(sc->value(kP0 + 0.125) == doctest::Approx(1.0 + cc));
    const auto* k = sc->singular();
    CHECK((k ? k->total_mass() : 0.0) == doctest::Approx(cc).epsilon(1e-12));
  }
  auto full = subspace_scale(c.scale, kappa);
  for (double x : {-0.3, 0.001, 0.009, 0.0178, 0.4}) {
    CHECK(full->value(x) == doctest::Approx(c.scale->value(x)).epsilon(1e-13));
  }
}

TEST_CASE("lebesgue decomposition keeps the absolutely continuous part") {
  auto d = lebesgue_decompose(fat().scale, 3);
  CHECK(d.kappa_mass == doctest::Approx(0.5).epsilon(1e-12));
  auto ac = abs_cont_part(fat().scale);
  CHECK(ac->singular() == nullptr);
  // without kappa the hull contributes 1/2 instead of 1
  CHECK(ac->value(kP0) - ac->value(0.0) == doctest::Approx(0.5).epsilon(1e-9));
}
