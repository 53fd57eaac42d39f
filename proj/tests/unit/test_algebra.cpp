#include <doctest.h>

#include "nilfourier/catalog.hpp"
#include "test_support.hpp"

using namespace nilfourier;
using nilfourier::testing::dynkin_bch;
using nilfourier::testing::rand_vec;

namespace {

StructureConstants heis() { return *get_group("heisenberg").sc; }
StructureConstants engel() { return *get_group("engel").sc; }

}  // namespace

TEST_SUITE_BEGIN("algebra");

TEST_CASE("preset structure constants are valid") {
  for (const auto& name : catalog_names()) {
    GroupBundle b = get_group(name);
    CHECK(b.sc->jacobi_residual() <= 1e-12);
    CHECK(b.sc->flag_ideal_residual(b.sc->refined_flag()) <= 1e-10);
  }
  CHECK(get_group("abelian1").sc->step() == 1);
  CHECK(get_group("abelian2").sc->step() == 1);
  CHECK(heis().step() == 2);
  CHECK(engel().step() == 3);
}

TEST_CASE("bracket evaluates the structure constants") {
  StructureConstants sc = heis();
  AlgebraElement x{Vec::Unit(3, 0)}, y{Vec::Unit(3, 1)};
  Vec z = sc.bracket(x, y).coords;
  CHECK((z - Vec::Unit(3, 2)).cwiseAbs().maxCoeff() == 0.0);

  // antisymmetry: [a, a] = 0
  AlgebraElement a{rand_vec(3, 11, 0)};
  CHECK(sc.bracket(a, a).coords.cwiseAbs().maxCoeff() == 0.0);

  // [X1, [X1, X2]] = X4 in the step-3 preset
  StructureConstants e = engel();
  AlgebraElement x1{Vec::Unit(4, 0)}, x2{Vec::Unit(4, 1)};
  Vec nested = e.bracket(x1, e.bracket(x1, x2)).coords;
  CHECK((nested - Vec::Unit(4, 3)).cwiseAbs().maxCoeff() == 0.0);

  CHECK_THROWS_AS(sc.bracket(AlgebraElement{Vec::Zero(2)}, a), InputError);
}

TEST_CASE("bch: abelian sum, heisenberg closed form, inverse") {
  StructureConstants ab = *get_group("abelian2").sc;
  Vec a = rand_vec(2, 21, 0), b = rand_vec(2, 21, 1);
  Vec out(2);
  ab.bch(a, b, out);
  CHECK((out - (a + b)).cwiseAbs().maxCoeff() == 0.0);

  // closed form from the depth-2 series: (x1+x2, y1+y2, t1+t2+(x1 y2 - y1 x2)/2)
  StructureConstants h = heis();
  Vec u = rand_vec(3, 22, 0), v = rand_vec(3, 22, 1), w(3);
  h.bch(u, v, w);
  Vec expect(3);
  expect << u[0] + v[0], u[1] + v[1], u[2] + v[2] + 0.5 * (u[0] * v[1] - u[1] * v[0]);
  CHECK((w - expect).cwiseAbs().maxCoeff() <= 1e-14);

  h.bch(u, Vec(-u), w);
  CHECK(w.cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("bch agrees with the Dynkin-series oracle") {
  for (const auto& name : catalog_names()) {
    StructureConstants sc = *get_group(name).sc;
    for (int trial = 0; trial < 100; ++trial) {
      Vec a = rand_vec(sc.dim(), 31, std::uint64_t(2 * trial));
      Vec b = rand_vec(sc.dim(), 31, std::uint64_t(2 * trial + 1));
      Vec fast(sc.dim());
      sc.bch(a, b, fast);
      Vec slow = dynkin_bch(sc, a, b);
      CHECK((fast - slow).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }
}

TEST_CASE("group law: identity, inverse, closed-form product") {
  StructureConstants h = heis();
  GroupElement e = h.identity();
  GroupElement g{rand_vec(3, 41, 0)};
  CHECK((h.mul(e, g).coords - g.coords).cwiseAbs().maxCoeff() == 0.0);
  CHECK(h.mul(g, h.inv(g)).coords.cwiseAbs().maxCoeff() <= 1e-12);

  GroupElement gx{Vec::Unit(3, 0)}, gy{Vec::Unit(3, 1)};
  Vec expect(3);
  expect << 1.0, 1.0, 0.5;
  CHECK((h.mul(gx, gy).coords - expect).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("bch associativity on random triples") {
  for (const auto& name : catalog_names()) {
    StructureConstants sc = *get_group(name).sc;
    for (int trial = 0; trial < 200; ++trial) {
      GroupElement a{rand_vec(sc.dim(), 51, std::uint64_t(3 * trial))};
      GroupElement b{rand_vec(sc.dim(), 51, std::uint64_t(3 * trial + 1))};
      GroupElement c{rand_vec(sc.dim(), 51, std::uint64_t(3 * trial + 2))};
      Vec lhs = sc.mul(sc.mul(a, b), c).coords;
      Vec rhs = sc.mul(a, sc.mul(b, c)).coords;
      CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-10);
    }
  }
}

TEST_CASE("coadjoint action") {
  StructureConstants h = heis();
  LinearFunctional l{rand_vec(3, 61, 0)};
  GroupElement e = h.identity();
  CHECK((h.coadjoint(e, l).covector - l.covector).cwiseAbs().maxCoeff() == 0.0);

  // center component is invariant and the generic orbit is swept affinely:
  // Ad*(x,y,t) l = (lx + y lz, ly - x lz, lz)
  GroupElement g{rand_vec(3, 61, 1)};
  Vec got = h.coadjoint(g, l).covector;
  CHECK(got[2] == doctest::Approx(l.covector[2]).epsilon(1e-14));
  CHECK(got[0] == doctest::Approx(l.covector[0] + g.coords[1] * l.covector[2]).epsilon(1e-12));
  CHECK(got[1] == doctest::Approx(l.covector[1] - g.coords[0] * l.covector[2]).epsilon(1e-12));

  // abelian: trivial action
  StructureConstants ab = *get_group("abelian2").sc;
  LinearFunctional l2{rand_vec(2, 61, 2)};
  GroupElement g2{rand_vec(2, 61, 3)};
  CHECK((ab.coadjoint(g2, l2).covector - l2.covector).cwiseAbs().maxCoeff() == 0.0);

  // left action: Ad*(g1) Ad*(g2) = Ad*(g1 g2), checked on the step-3 preset
  StructureConstants en = engel();
  for (int trial = 0; trial < 50; ++trial) {
    GroupElement g1{rand_vec(4, 62, std::uint64_t(3 * trial))};
    GroupElement gg2{rand_vec(4, 62, std::uint64_t(3 * trial + 1))};
    LinearFunctional lf{rand_vec(4, 62, std::uint64_t(3 * trial + 2))};
    Vec lhs = en.coadjoint(g1, en.coadjoint(gg2, lf)).covector;
    Vec rhs = en.coadjoint(en.mul(g1, gg2), lf).covector;
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("lower central series and flags") {
  StructureConstants ab = *get_group("abelian2").sc;
  CHECK(ab.lower_central_series().size() == 2);  // g, {0}
  CHECK(ab.lower_central_series()[1].cols() == 0);

  StructureConstants h = heis();
  const auto& series = h.lower_central_series();
  REQUIRE(series.size() == 3);
  REQUIRE(series[1].cols() == 1);
  CHECK((series[1].col(0).cwiseAbs() - Vec::Unit(3, 2)).cwiseAbs().maxCoeff() <= 1e-14);

  StructureConstants en = engel();
  const auto& es = en.lower_central_series();
  REQUIRE(es.size() == 4);
  CHECK(es[1].cols() == 2);  // span{X3, X4}
  CHECK(es[2].cols() == 1);  // span{X4}
  SpanBasis sb(4);
  sb.try_add(Vec::Unit(4, 2));
  sb.try_add(Vec::Unit(4, 3));
  for (int c = 0; c < es[1].cols(); ++c) CHECK(sb.residual(es[1].col(c)) <= 1e-12);

  // the refined flag starts at the deepest ideal
  CHECK((h.refined_flag().col(0).cwiseAbs() - Vec::Unit(3, 2)).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK(en.flag_ideal_residual(en.refined_flag()) <= 1e-10);
}

TEST_CASE("non-nilpotent algebras are rejected") {
  // sl2: [h, e] = 2e, [h, f] = -2f, [e, f] = h
  std::vector<BracketEntry> br(3);
  br[0] = {0, 1, Vec(3)};
  br[0].coeffs << 0, 2, 0;
  br[1] = {0, 2, Vec(3)};
  br[1].coeffs << 0, 0, -2;
  br[2] = {1, 2, Vec(3)};
  br[2].coeffs << 1, 0, 0;
  CHECK_THROWS_WITH_AS(StructureConstants(3, br, "sl2"),
                       doctest::Contains("not nilpotent"), InputError);

  // solvable but not nilpotent: [x, y] = y
  std::vector<BracketEntry> br2(1);
  br2[0] = {0, 1, Vec(2)};
  br2[0].coeffs << 0, 1;
  CHECK_THROWS_AS(StructureConstants(2, br2, "affine"), InputError);
}

TEST_CASE("jacobi violations and deep algebras are rejected") {
  // [x, y] = z, [x, z] = x violates Jacobi
  std::vector<BracketEntry> br(2);
  br[0] = {0, 1, Vec(3)};
  br[0].coeffs << 0, 0, 1;
  br[1] = {0, 2, Vec(3)};
  br[1].coeffs << 1, 0, 0;
  CHECK_THROWS_WITH_AS(StructureConstants(3, br, "bad"), doctest::Contains("Jacobi"),
                       InputError);

  // filiform chain of step 5
  std::vector<BracketEntry> chain;
  for (int i = 1; i <= 4; ++i) {
    BracketEntry e;
    e.i = 0;
    e.j = i;
    e.coeffs = Vec::Zero(6);
    e.coeffs[i + 1] = 1.0;
    chain.push_back(e);
  }
  CHECK_THROWS_WITH_AS(StructureConstants(6, chain, "deep"), doctest::Contains("step"),
                       InputError);
}

TEST_SUITE_END();
