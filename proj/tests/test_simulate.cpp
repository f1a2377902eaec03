#include <cmath>
#include <cstring>

#include "doctest.h"
#include "scalesim/experiment.hpp"
#include "scalesim/rng.hpp"
#include "scalesim/simulate.hpp"

using namespace scalesim;

TEST_CASE("rng streams are reproducible and distinct") {
  Rng a(1, 0), b(1, 0), c(1, 1);
  for (int i = 0; i < 10; ++i) {
    auto x = a.next();
    CHECK(x == b.next());
    CHECK(x != c.next());
  }
  Rng u(9, 3);
  double m = 0, v = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    double z = u.normal();
    m += z;
    v += z * z;
  }
  CHECK(std::abs(m / n) < 4.0 / std::sqrt(n));
  CHECK(v / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("brownian chain has symmetric steps and holding time spacing^2") {
  auto bm = bundled_spec("brownian");
  auto chain = build_chain(bm, make_grid(bm, -1.0, 1.0, 0.1));
  for (std::size_t k = 1; k + 1 < chain.grid.size(); ++k) {
    CHECK(chain.p_up[k] == doctest::Approx(0.5));
    CHECK(chain.tau[k] == doctest::Approx(0.01).epsilon(1e-9));
  }
}

TEST_CASE("skew chain holding time at the skew point") {
  auto sk = skew_bm_spec(0.2);
  auto chain = build_chain(sk, make_grid(sk, -1.0, 1.0, 0.1, {0.0}));
  std::size_t k0 = chain.grid.index_of(0.0);
  // gamma1 = 5 left, gamma2 = 1.25 right: p_up = 5 / 6.25
  CHECK(chain.p_up[k0] == doctest::Approx(0.8));
  CHECK(chain.tau[k0] == doctest::Approx(0.01).epsilon(1e-9));
}

TEST_CASE("serial and parallel batches are identical") {
  auto spec = bundled_spec("cantor");
  auto chain = build_chain(spec, make_grid(spec, -3, 3, 0.05, {0.0, 1.0 / 56}));
  SimConfig cfg;
  cfg.paths = 500;
  cfg.seed = 77;
  cfg.observation_times = {0.25, 0.5, 1.0};
  cfg.qv_sample_step = 0.01;
  cfg.record_paths = 3;
  cfg.parallel = false;
  auto a = simulate_chain(chain, 0.0, cfg);
  cfg.parallel = true;
  auto b = simulate_chain(chain, 0.0, cfg);
  REQUIRE(a.summaries.size() == b.summaries.size());
  for (std::size_t i = 0; i < a.summaries.size(); ++i) {
    CHECK(a.summaries[i].final_state == b.summaries[i].final_state);
    CHECK(a.summaries[i].qv == b.summaries[i].qv);
    CHECK(a.summaries[i].sampled_qv == b.summaries[i].sampled_qv);
    CHECK(a.summaries[i].observed == b.summaries[i].observed);
  }
  CHECK(a.recorded[2].times == b.recorded[2].times);
  auto ea = simulate_exits(chain, -1.0, 0.0, 1.0, 2000, 5, 0, false);
  auto eb = simulate_exits(chain, -1.0, 0.0, 1.0, 2000, 5, 0, true);
  CHECK(ea == eb);
}

TEST_CASE("exit frequency matches the scale function") {
  auto bm = bundled_spec("brownian");
  auto chain = build_chain(bm, make_grid(bm, -1.0, 1.0, 0.25, {0.5}));
  auto h = simulate_exits(chain, -1.0, 0.5, 1.0, 40000, 3);
  double f = 0;
  for (auto v : h) f += v;
  f /= h.size();
  // (0.5 + 1) / 2
  CHECK(std::abs(f - 0.75) < 3 * std::sqrt(0.75 * 0.25 / 40000));
}

TEST_CASE("euler scheme recovers constant drift") {
  auto o = build_orey_scale(Drift::constant(1.0));
  auto spec = make_spec("orey", o.scale, o.speed);
  EulerModel em = make_euler_model(spec);
  SimConfig cfg;
  cfg.paths = 4000;
  cfg.euler_step = 1e-2;
  auto r = simulate_euler(em, 0.0, cfg);
  double m = 0, rr = 0;
  for (const auto& p : r.summaries) {
    m += p.final_state;
    rr += p.residual;
  }
  m /= cfg.paths;
  CHECK(std::abs(m - 1.0) < 4.0 / std::sqrt(4000.0));
  CHECK(std::abs(rr / cfg.paths) < 4.0 / std::sqrt(4000.0));
}

TEST_CASE("grid rejects points off the grid") {
  auto bm = bundled_spec("brownian");
  auto g = make_grid(bm, -1.0, 1.0, 0.5);
  CHECK(g.index_of(0.0) == 2);
  CHECK_THROWS(g.index_of(0.3));
}
