#include <cmath>

#include "doctest.h"
#include "scalesim/cantor.hpp"

using namespace scalesim;

namespace {

CantorTree fat_tree(int depth = 12) {
  GeneralizedCantorSpec s;
  s.removal = RemovalRule::geometric(1.0, 0.25);
  s.depth = depth;
  return CantorTree(s);
}

}  // namespace

TEST_CASE("fat cantor set has measure one half") {
  // 1 - sum_n 2^(n-1) 4^-n = 1/2
  CHECK(fat_tree().k_measure() == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(fat_tree(30).k_measure() == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("integral of the distance function") {
  // each gap of length l contributes l^2 / 4: sum_n 2^(n-1) 16^-n / 4 = 1/56
  auto t = fat_tree();
  CHECK(t.total_psi_integral() == doctest::Approx(1.0 / 56).epsilon(1e-14));
  // first gap is (3/8, 5/8); the cell to its left holds half of 1/56 - 1/64
  CHECK(t.psi_integral(0.375) == doctest::Approx(1.0 / 896).epsilon(1e-13));
  CHECK(t.psi_integral(0.5) == doctest::Approx(1.0 / 896 + 1.0 / 128).epsilon(1e-13));
  CHECK(t.psi_integral(1.0) == doctest::Approx(1.0 / 56).epsilon(1e-14));
}

TEST_CASE("distance function and its slope in gaps") {
  auto t = fat_tree();
  CHECK(t.psi(0.5) == doctest::Approx(0.125));
  CHECK(t.psi(0.375) == doctest::Approx(0.0));
  CHECK(t.psi(0.45) == doctest::Approx(0.075));
  CHECK(t.psi_derivative(0.45) == doctest::Approx(1.0));
  CHECK(t.psi_derivative(0.55) == doctest::Approx(-1.0));
}

TEST_CASE("splitting cdf at gap endpoints") {
  auto t = fat_tree();
  CHECK(t.split_cdf(0.375) == 0.5);
  CHECK(t.split_cdf(0.625) == 0.5);
  CHECK(t.split_cdf(0.0) == 0.0);
  CHECK(t.split_cdf(1.0) == 1.0);
  // second generation gaps have length 1/16, centred in [0, 3/8] and [5/8, 1]
  CHECK(t.split_cdf(0.1875 - 1.0 / 32) == 0.25);
  CHECK(t.split_cdf(0.8125 + 1.0 / 32) == 0.75);
}

TEST_CASE("inverse of the distance integral") {
  auto t = fat_tree();
  for (double v : {0.0, 1e-9, 1e-4, 1.0 / 896, 0.009, 0.0178}) {
    CHECK(t.psi_integral(t.invert_psi_integral(v)) == doctest::Approx(v).epsilon(1e-12));
  }
  // inside gaps psi is bounded below, so the round trip in u is well conditioned
  for (double u : {0.2, 0.4, 0.45, 0.5, 0.8}) {
    CHECK(t.invert_psi_integral(t.psi_integral(u)) == doctest::Approx(u).epsilon(1e-10));
  }
}

TEST_CASE("middle thirds has no mass in the limit") {
  GeneralizedCantorSpec s;
  s.removal = RemovalRule::fraction(1.0 / 3);
  s.depth = 20;
  CantorTree t(s);
  CHECK(t.k_measure() == 0.0);
  CHECK(t.non_k_length(1.0) == doctest::Approx(1.0));
  // 1/3 and 1/9 round to just below a gap endpoint, inside a depth-20 cell
  CHECK(t.split_cdf(0.5) == 0.5);
  CHECK(t.split_cdf(1.0 / 3) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(t.split_cdf(1.0 / 9) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("singular measure restriction and reweighting") {
  auto tree = std::make_shared<const CantorTree>(fat_tree());
  SingularMeasure k(tree, 1.0, [](double x) { return x; }, Interval(0.0, 1.0));
  CHECK(k.total_mass() == doctest::Approx(1.0));
  CHECK(k.mass(0.0, 0.5) == doctest::Approx(0.5));
  auto r = k.restricted(0.3, 0.7);
  CHECK(r.total_mass() == doctest::Approx(k.mass(0.3, 0.7)).epsilon(1e-14));
  auto w = k.reweighted(0.5, 2.0, 3.0);
  CHECK(w.total_mass() == doctest::Approx(2.5));
}
