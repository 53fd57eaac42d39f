#include <doctest.h>

#include "nilfourier/catalog.hpp"
#include "test_support.hpp"

using namespace nilfourier;
using nilfourier::testing::rand_vec;

namespace {

Mat random_skew(int n, std::uint64_t seed, std::uint64_t idx) {
  Mat b = Mat::Zero(n, n);
  std::uint64_t c = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      b(i, j) = rng_uniform(seed, 0x5EEDull, idx * 1024 + c++, -1.0, 1.0);
      b(j, i) = -b(i, j);
    }
  return b;
}

}  // namespace

TEST_SUITE_BEGIN("orbits");

TEST_CASE("skew form of the bracket pairing") {
  GroupBundle h = get_group("heisenberg");
  LinearFunctional zero{Vec::Zero(3)};
  CHECK(skew_form(*h.sc, zero).cwiseAbs().maxCoeff() == 0.0);

  double lam = 1.75;
  LinearFunctional l{Vec(lam * Vec::Unit(3, 2))};
  Mat b = skew_form(*h.sc, l);
  CHECK((b + b.transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(b(0, 1) == lam);
  CHECK(b(1, 0) == -lam);
  CHECK(b.row(2).cwiseAbs().maxCoeff() == 0.0);
  CHECK(skew_rank(b) == 2);

  GroupBundle ab = get_group("abelian2");
  LinearFunctional l2{rand_vec(2, 71, 0)};
  CHECK(skew_form(*ab.sc, l2).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("pfaffian: definition, odd dimensions, determinant oracle") {
  Mat b2(2, 2);
  b2 << 0.0, 1.25, -1.25, 0.0;
  CHECK(pfaffian(b2) == 1.25);

  CHECK(pfaffian(Mat::Zero(3, 3)) == 0.0);
  CHECK(pfaffian(random_skew(5, 81, 0)) == 0.0);
  CHECK(pfaffian(Mat(0, 0)) == 1.0);

  for (int trial = 0; trial < 100; ++trial) {
    for (int n : {4, 6}) {
      Mat b = random_skew(n, 82, std::uint64_t(100 * n + trial));
      double pf = pfaffian(b);
      double det = b.determinant();
      CHECK(pf * pf == doctest::Approx(det).epsilon(1e-10));
    }
  }

  Mat not_skew = Mat::Identity(4, 4);
  CHECK_THROWS_AS(pfaffian(not_skew), InputError);
}

TEST_CASE("vergne polarization: heisenberg") {
  GroupBundle h = get_group("heisenberg");
  Vec lam = Vec::Constant(1, 2.5);
  Polarization pol = vergne_polarization(*h.sc, h.chart.at(lam), h.flag);
  CHECK(pol.dim_h() == 2);
  CHECK(pol.dim_x() == 1);
  // h = span{Y, Z}
  SpanBasis yz(3);
  yz.try_add(Vec::Unit(3, 1));
  yz.try_add(Vec::Unit(3, 2));
  for (int c = 0; c < 2; ++c) CHECK(yz.residual(pol.h_basis.col(c)) <= 1e-12);
  // complement {X}
  CHECK((pol.complement.col(0) - Vec::Unit(3, 0)).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK(pol.invariant_residual(*h.sc) <= 1e-10);
}

TEST_CASE("vergne polarization: abelian gives h = g") {
  GroupBundle ab = get_group("abelian2");
  Polarization pol = vergne_polarization(*ab.sc, LinearFunctional{rand_vec(2, 91, 0)}, ab.flag);
  CHECK(pol.dim_h() == 2);
  CHECK(pol.dim_x() == 0);
}

TEST_CASE("vergne polarization: engel") {
  GroupBundle en = get_group("engel");
  Vec lam(2);
  lam << 1.5, 0.0;  // l = lambda_1 X4*
  Polarization pol = vergne_polarization(*en.sc, en.chart.at(lam), en.flag);
  CHECK(pol.dim_h() == 3);
  SpanBasis s(4);
  s.try_add(Vec::Unit(4, 1));
  s.try_add(Vec::Unit(4, 2));
  s.try_add(Vec::Unit(4, 3));
  for (int c = 0; c < 3; ++c) CHECK(s.residual(pol.h_basis.col(c)) <= 1e-12);
  CHECK((pol.complement.col(0) - Vec::Unit(4, 0)).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK(pol.invariant_residual(*en.sc) <= 1e-10);
}

TEST_CASE("polarization invariants at random chart-generic points") {
  for (const auto& name : catalog_names()) {
    GroupBundle b = get_group(name);
    for (int trial = 0; trial < 100; ++trial) {
      Vec lam(b.chart.k);
      for (int c = 0; c < b.chart.k; ++c) {
        double v = rng_uniform(101, std::uint64_t(c), std::uint64_t(trial), -4.0, 4.0);
        // keep the leading chart coordinate away from the non-generic set
        if (c == 0 && std::abs(v) < 0.25) v += (v >= 0 ? 0.5 : -0.5);
        lam[c] = v;
      }
      if (plancherel_density(*b.sc, b.chart, lam).non_generic) continue;
      Polarization pol = vergne_polarization(*b.sc, b.chart.at(lam), b.flag);
      CHECK(pol.invariant_residual(*b.sc) <= 1e-10);
      // the subgroup does not move across the chart's generic stratum
      Polarization ref = vergne_polarization(*b.sc, b.chart.at(b.chart.reference_lambda), b.flag);
      CHECK(pol.dim_h() == ref.dim_h());
      SpanBasis span(b.sc->dim());
      for (int c = 0; c < ref.dim_h(); ++c) span.try_add(ref.h_basis.col(c));
      for (int c = 0; c < pol.dim_h(); ++c) CHECK(span.residual(pol.h_basis.col(c)) <= 1e-10);
    }
  }
}

TEST_CASE("vergne rejects a non-ideal flag") {
  GroupBundle h = get_group("heisenberg");
  Mat bad(3, 3);  // X < {X, Y} < g is not an ideal flag for [X, Y] = Z
  bad.col(0) = Vec::Unit(3, 0);
  bad.col(1) = Vec::Unit(3, 1);
  bad.col(2) = Vec::Unit(3, 2);
  CHECK_THROWS_WITH_AS(vergne_polarization(*h.sc, h.chart.at(Vec::Ones(1)), bad),
                       doctest::Contains("ideal flag"), InternalError);
}

TEST_CASE("plancherel density") {
  GroupBundle h = get_group("heisenberg");
  for (double lam : {0.25, -1.5, 3.0}) {
    DensityValue dv = plancherel_density(*h.sc, h.chart, Vec::Constant(1, lam));
    CHECK(!dv.non_generic);
    CHECK(dv.r == doctest::Approx(std::abs(lam)).epsilon(1e-14));
  }
  DensityValue at0 = plancherel_density(*h.sc, h.chart, Vec::Zero(1));
  CHECK(at0.non_generic);
  CHECK(at0.r == 0.0);

  GroupBundle ab = get_group("abelian1");
  DensityValue dva = plancherel_density(*ab.sc, ab.chart, Vec::Constant(1, -2.0));
  CHECK(!dva.non_generic);
  CHECK(dva.r == 1.0);

  GroupBundle en = get_group("engel");
  Vec lam(2);
  lam << -2.25, 1.0;
  DensityValue dve = plancherel_density(*en.sc, en.chart, lam);
  CHECK(!dve.non_generic);
  CHECK(dve.r == doctest::Approx(2.25).epsilon(1e-14));
  lam << 0.0, 1.0;
  CHECK(plancherel_density(*en.sc, en.chart, lam).non_generic);
}

TEST_CASE("chart dimensions match the generic orbit dimension") {
  CHECK(get_group("abelian1").chart.k == 1);
  CHECK(get_group("abelian2").chart.k == 2);
  CHECK(get_group("heisenberg").chart.k == 1);
  CHECK(get_group("engel").chart.k == 2);
}

TEST_SUITE_END();
