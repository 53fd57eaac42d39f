#include <doctest.h>

#include <cmath>

#include "nilfourier/catalog.hpp"
#include "test_support.hpp"

using namespace nilfourier;
using nilfourier::testing::rand_vec;

TEST_SUITE_BEGIN("catalog");

TEST_CASE("presets load and validate") {
  for (const auto& name : catalog_names()) {
    GroupBundle b = get_group(name);
    CHECK(b.name == name);
    CHECK(b.sc->dim() >= 1);
    CHECK(b.g_grid.dim() == b.sc->dim());
    CHECK(b.x_grid.dim() == b.geometry().dim_x());
    CHECK(b.lambda_grid.dim() == b.chart.k);
  }
  CHECK(get_group("heisenberg").geometry().dim_x() == 1);
  CHECK(get_group("engel").geometry().dim_x() == 1);
  CHECK(get_group("abelian1").geometry().dim_x() == 0);
}

TEST_CASE("unknown names list the presets") {
  CHECK_THROWS_WITH_AS(get_group("nope"), doctest::Contains("abelian1"), InputError);
}

TEST_CASE("oracle closed forms at distinguished elements") {
  GroupBundle h = get_group("heisenberg");
  double lam = 1.4;
  Vec lamv = Vec::Constant(1, lam);

  // central element: pure phase e^{i lambda t'}
  OracleAction a = h.oracle(lamv, GroupElement{Vec(0.8 * Vec::Unit(3, 2))});
  CHECK(a.const_phase == doctest::Approx(lam * 0.8).epsilon(1e-14));
  CHECK(a.xi_phase.cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.shift.cwiseAbs().maxCoeff() == 0.0);

  // g = exp(x' X): pure shift
  OracleAction s = h.oracle(lamv, GroupElement{Vec(0.5 * Vec::Unit(3, 0))});
  CHECK(s.const_phase == 0.0);
  CHECK(s.xi_phase.cwiseAbs().maxCoeff() == 0.0);
  CHECK(s.shift[0] == 0.5);

  // abelian: the character
  GroupBundle ab = get_group("abelian1");
  OracleAction c = ab.oracle(Vec::Constant(1, 2.0), GroupElement{Vec::Constant(1, 0.3)});
  CHECK(c.const_phase == doctest::Approx(0.6).epsilon(1e-14));

  CHECK_THROWS_WITH_AS(get_group("engel").oracle(Vec::Ones(2), GroupElement{Vec::Zero(4)}),
                       doctest::Contains("no oracle"), InputError);
}

TEST_CASE("act matches the stored closed form on random triples") {
  for (const auto& name : {"heisenberg", "abelian1"}) {
    GroupBundle b = get_group(name);
    const int n = b.sc->dim();
    GridSpec xg = b.x_grid;
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      double lam = rng_uniform(161, 1, std::uint64_t(trial), 0.5, 2.5);
      Vec lamv = Vec::Constant(1, lam);
      GroupElement g{rand_vec(n, 161, std::uint64_t(trial), 0.6)};
      CVec f(xg.size());
      for (std::int64_t i = 0; i < xg.size(); ++i) {
        double prod = 1.0;
        Vec p = xg.point(i);
        for (int d = 0; d < xg.dim(); ++d)
          prod *= bump_profile((p[d] - 0.1 * double(trial % 5)) / 1.1);
        f[i] = Complex(prod, 0.3 * prod);
      }
      CVec via_act = b.rep_at(lamv).act(g, xg, f);
      CVec via_oracle = apply_oracle(b.oracle(lamv, g), xg, f);
      for (std::int64_t i = 0; i < xg.size(); ++i)
        worst = std::max(worst, std::abs(via_act[i] - via_oracle[i]));
    }
    CHECK(worst <= 1e-10);  // same interpolation path: only the phases differ
  }
}

TEST_SUITE_END();
