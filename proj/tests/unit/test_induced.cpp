#include <doctest.h>

#include <cmath>
#include <numbers>

#include "nilfourier/catalog.hpp"
#include "nilfourier/io.hpp"
#include "test_support.hpp"

using namespace nilfourier;
using nilfourier::testing::rand_vec;

namespace {

GroupBundle h2_bundle() {
  return load_group_files(std::string(NILF_TEST_DATA_DIR) + "/h2.json",
                          std::string(NILF_TEST_DATA_DIR) + "/h2_chart.json");
}

CVec smooth_bump(const GridSpec& xg, double width, double center = 0.0) {
  CVec f(xg.size());
  for (std::int64_t i = 0; i < xg.size(); ++i) {
    double prod = 1.0;
    Vec p = xg.point(i);
    for (int d = 0; d < xg.dim(); ++d) prod *= bump_profile((p[d] - center) / width);
    f[i] = prod;
  }
  return f;
}

double weighted_norm_sq(const GridSpec& xg, const CVec& f) {
  double acc = 0.0;
  for (std::int64_t i = 0; i < xg.size(); ++i) acc += xg.weight(i) * std::norm(f[i]);
  return acc;
}

}  // namespace

TEST_SUITE_BEGIN("induced");

TEST_CASE("character values and membership") {
  GroupBundle h = get_group("heisenberg");
  double lam = 1.5;
  InducedRep rep = h.rep_at(Vec::Constant(1, lam));

  CHECK(rep.character(h.sc->identity()) == Complex(1.0, 0.0));

  // <l, log h> = pi gives -1
  Vec v = Vec::Zero(3);
  v[2] = std::numbers::pi / lam;
  CHECK(rep.character(GroupElement{v}).real() == doctest::Approx(-1.0).epsilon(1e-14));

  // h = exp(aY + bZ) -> e^{i lambda b}
  double a = 0.7, b = -1.2;
  Vec w = Vec::Zero(3);
  w[1] = a;
  w[2] = b;
  Complex got = rep.character(GroupElement{w});
  CHECK(got.real() == doctest::Approx(std::cos(lam * b)).epsilon(1e-14));
  CHECK(got.imag() == doctest::Approx(std::sin(lam * b)).epsilon(1e-14));
  CHECK(std::abs(got) == doctest::Approx(1.0).epsilon(1e-14));

  CHECK_THROWS_AS(rep.character(GroupElement{Vec(Vec::Unit(3, 0))}), InputError);
}

TEST_CASE("section is the ordered product of complement exponentials") {
  GroupBundle h = get_group("heisenberg");
  const CosetGeometry& geo = h.geometry();
  CHECK(geo.section(XPoint{Vec::Zero(1)}).coords.cwiseAbs().maxCoeff() == 0.0);
  GroupElement s = geo.section(XPoint{Vec::Constant(1, 1.25)});
  CHECK((s.coords - Vec(1.25 * Vec::Unit(3, 0))).cwiseAbs().maxCoeff() == 0.0);

  GroupBundle en = get_group("engel");
  GroupElement se = en.geometry().section(XPoint{Vec::Constant(1, -0.75)});
  CHECK((se.coords - Vec(-0.75 * Vec::Unit(4, 0))).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("factorize: closed form and round trips") {
  GroupBundle h = get_group("heisenberg");
  const CosetGeometry& geo = h.geometry();

  // g = (x, y, t) = exp(yY + (t + xy/2) Z) . exp(xX)
  Vec g(3);
  g << 0.8, -0.5, 1.1;
  Factorization f = geo.factorize(GroupElement{g});
  CHECK(f.x.coords[0] == doctest::Approx(0.8).epsilon(1e-14));
  Vec h_expect(3);
  h_expect << 0.0, -0.5, 1.1 + 0.8 * (-0.5) / 2.0;
  CHECK((f.h.coords - h_expect).cwiseAbs().maxCoeff() <= 1e-14);

  // g in H factorizes as (g, 0)
  Vec in_h = Vec::Zero(3);
  in_h[1] = 0.4;
  in_h[2] = -2.0;
  Factorization fh = geo.factorize(GroupElement{in_h});
  CHECK(fh.x.coords.cwiseAbs().maxCoeff() <= 1e-14);
  CHECK((fh.h.coords - in_h).cwiseAbs().maxCoeff() <= 1e-14);

  // s(x) factorizes as (identity, x)
  XPoint x{Vec::Constant(1, -1.6)};
  Factorization fs = geo.factorize(geo.section(x));
  CHECK(fs.h.coords.cwiseAbs().maxCoeff() <= 1e-14);
  CHECK(fs.x.coords[0] == doctest::Approx(-1.6).epsilon(1e-14));
}

TEST_CASE("factorize round trip on every preset and the 5-dim fixture") {
  std::vector<GroupBundle> bundles;
  for (const auto& name : catalog_names()) bundles.push_back(get_group(name));
  bundles.push_back(h2_bundle());
  for (const GroupBundle& b : bundles) {
    const CosetGeometry& geo = b.geometry();
    for (int trial = 0; trial < 100; ++trial) {
      GroupElement g{rand_vec(b.sc->dim(), 111, std::uint64_t(trial))};
      Factorization f = geo.factorize(g);
      CHECK(geo.h_membership_residual(f.h.coords) <= 1e-10);
      GroupElement back = b.sc->mul(f.h, geo.section(f.x));
      CHECK((back.coords - g.coords).cwiseAbs().maxCoeff() <= 1e-10);
    }
  }
}

TEST_CASE("malcev chart inverts and preserves volume") {
  for (const auto& name : {"heisenberg", "engel"}) {
    GroupBundle b = get_group(name);
    const CosetGeometry& geo = b.geometry();
    const int n = b.sc->dim();
    for (int trial = 0; trial < 20; ++trial) {
      Vec mal = rand_vec(n, 121, std::uint64_t(trial));
      GroupElement g = geo.malcev_point(mal);
      Vec back = geo.malcev_coords(g);
      CHECK((back - mal).cwiseAbs().maxCoeff() <= 1e-10);

      // the chart pushes Lebesgue measure to Haar: |det D| = 1
      Mat jac(n, n);
      double step = 1e-5;
      for (int d = 0; d < n; ++d) {
        Vec hi = mal, lo = mal;
        hi[d] += step;
        lo[d] -= step;
        jac.col(d) = (geo.malcev_point(hi).coords - geo.malcev_point(lo).coords) / (2 * step);
      }
      CHECK(std::abs(std::abs(jac.determinant()) - 1.0) <= 1e-8);
    }
  }
}

TEST_CASE("cocycle values") {
  GroupBundle h = get_group("heisenberg");
  double lam = 2.0;
  InducedRep rep = h.rep_at(Vec::Constant(1, lam));
  XPoint xi{Vec::Constant(1, 0.9)};

  auto [a_id, x_id] = rep.cocycle(h.sc->identity(), xi);
  CHECK(std::abs(a_id - Complex(1.0, 0.0)) <= 1e-14);
  CHECK(x_id.coords[0] == doctest::Approx(0.9).epsilon(1e-14));

  // central g = exp(t' Z): pure phase e^{i lambda t'}, x unchanged
  double tp = -0.6;
  GroupElement central{Vec(tp * Vec::Unit(3, 2))};
  auto [a_c, x_c] = rep.cocycle(central, xi);
  CHECK(std::abs(a_c - std::polar(1.0, lam * tp)) <= 1e-12);
  CHECK(x_c.coords[0] == doctest::Approx(0.9).epsilon(1e-13));

  // g = exp(y' Y): phase e^{i lambda xi y'}, x unchanged
  double yp = 1.3;
  GroupElement shear{Vec(yp * Vec::Unit(3, 1))};
  auto [a_s, x_s] = rep.cocycle(shear, xi);
  CHECK(std::abs(a_s - std::polar(1.0, lam * 0.9 * yp)) <= 1e-12);
  CHECK(x_s.coords[0] == doctest::Approx(0.9).epsilon(1e-13));
}

TEST_CASE("cocycle identity A(g1 g2, x) = A(g1, x) A(g2, x g1)") {
  std::vector<GroupBundle> bundles;
  for (const auto& name : catalog_names()) bundles.push_back(get_group(name));
  bundles.push_back(h2_bundle());
  for (const GroupBundle& b : bundles) {
    InducedRep rep = b.rep_at(b.chart.reference_lambda);
    const int q = rep.dim_x();
    for (int trial = 0; trial < 50; ++trial) {
      GroupElement g1{rand_vec(b.sc->dim(), 131, std::uint64_t(3 * trial))};
      GroupElement g2{rand_vec(b.sc->dim(), 131, std::uint64_t(3 * trial + 1))};
      XPoint x{rand_vec(q, 131, std::uint64_t(3 * trial + 2))};
      auto [a1, xg1] = rep.cocycle(g1, x);
      auto [a2, xg1g2] = rep.cocycle(g2, xg1);
      auto [a12, x12] = rep.cocycle(b.sc->mul(g1, g2), x);
      CHECK(std::abs(a12 - a1 * a2) <= 1e-8);
      if (q > 0) CHECK((x12.coords - xg1g2.coords).cwiseAbs().maxCoeff() <= 1e-8);
    }
  }
}

TEST_CASE("act: identity, pure shift, modulation, abelian collapse") {
  GroupBundle h = get_group("heisenberg");
  double lam = 1.0;
  InducedRep rep = h.rep_at(Vec::Constant(1, lam));
  GridSpec xg = h.x_grid;
  CVec f = smooth_bump(xg, 1.0, 0.3);

  CVec same = rep.act(h.sc->identity(), xg, f);
  CHECK((same - f).cwiseAbs().maxCoeff() <= 1e-14);

  // g = exp(x' X): [pi(g) f](xi) = f(xi + x'), no phase; on-grid shifts are exact
  double xp = 4.0 * xg.axis(0).spacing();
  CVec shifted = rep.act(GroupElement{Vec(xp * Vec::Unit(3, 0))}, xg, f);
  for (std::int64_t i = 0; i < xg.size() - 4; ++i)
    CHECK(std::abs(shifted[i] - f[i + 4]) <= 1e-12);

  // g = exp(y' Y): multiplication by e^{i lambda xi y'}
  double yp = 0.35;
  CVec mod = rep.act(GroupElement{Vec(yp * Vec::Unit(3, 1))}, xg, f);
  for (std::int64_t i = 0; i < xg.size(); ++i) {
    double xi = xg.point(i)[0];
    CHECK(std::abs(mod[i] - std::polar(1.0, lam * xi * yp) * f[i]) <= 1e-12);
  }

  // abelian: X is a point and act is exactly the character
  GroupBundle ab = get_group("abelian1");
  InducedRep rab = ab.rep_at(Vec::Constant(1, 1.7));
  CVec point_f = CVec::Constant(1, Complex(0.6, -0.2));
  GroupElement g{Vec::Constant(1, 0.8)};
  CVec acted = rab.act(g, ab.x_grid, point_f);
  CHECK(std::abs(acted[0] - std::polar(1.0, 1.7 * 0.8) * point_f[0]) <= 1e-15);
}

TEST_CASE("act is unitary and multiplicative on resolved functions") {
  GroupBundle h = get_group("heisenberg");
  InducedRep rep = h.rep_at(Vec::Constant(1, 1.0));
  GridSpec xg = h.x_grid;
  const double cell = xg.axis(0).spacing();

  double worst_unitary = 0.0, worst_hom = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    Vec c1 = rand_vec(3, 141, std::uint64_t(2 * trial), 8.0 * cell);
    Vec c2 = rand_vec(3, 141, std::uint64_t(2 * trial + 1), 8.0 * cell);
    GroupElement g1{c1}, g2{c2};
    // widths large enough that the cubic interpolation resolves the bump
    CVec f = smooth_bump(xg, 1.4 + 0.1 * (trial % 4), 0.2 * (trial % 3) - 0.2);
    double nf = weighted_norm_sq(xg, f);

    CVec gf = rep.act(g1, xg, f);
    worst_unitary = std::max(worst_unitary, std::abs(weighted_norm_sq(xg, gf) - nf) / nf);

    CVec lhs = rep.act(g1, xg, rep.act(g2, xg, f));
    CVec rhs = rep.act(h.sc->mul(g1, g2), xg, f);
    worst_hom = std::max(worst_hom,
                         std::sqrt(weighted_norm_sq(xg, CVec(lhs - rhs)) / nf));
  }
  CHECK(worst_unitary <= 1e-3);
  CHECK(worst_hom <= 1e-3);
}

TEST_CASE("act counts reads outside the sampled box") {
  GroupBundle h = get_group("heisenberg");
  InducedRep rep = h.rep_at(Vec::Constant(1, 1.0));
  GridSpec xg = h.x_grid;
  CVec f = smooth_bump(xg, 1.0);
  ActStats stats;
  rep.act(GroupElement{Vec(100.0 * Vec::Unit(3, 0))}, xg, f, &stats);
  CHECK(stats.out_of_box == xg.size());
}

TEST_CASE("cubic interpolation reproduces cubics and converges at fourth order") {
  auto cubic = [](double x) { return 0.3 + 1.2 * x - 0.7 * x * x + 0.25 * x * x * x; };
  GridSpec g({{0.0, 2.0, 17}});
  CVec vals(g.size());
  for (std::int64_t i = 0; i < g.size(); ++i) vals[i] = cubic(g.point(i)[0]);
  for (int t = 0; t < 50; ++t) {
    double x = rng_uniform(151, 0, std::uint64_t(t), -1.7, 1.7);
    CHECK(std::abs(interp_cubic(g, vals, Vec::Constant(1, x)) - cubic(x)) <= 1e-12);
  }

  auto smooth = [](double x) { return std::sin(3.0 * x) * std::exp(-x * x); };
  double err_coarse = 0.0, err_fine = 0.0;
  for (int pts : {33, 65}) {
    GridSpec gg({{0.0, 2.0, pts}});
    CVec vv(gg.size());
    for (std::int64_t i = 0; i < gg.size(); ++i) vv[i] = smooth(gg.point(i)[0]);
    double err = 0.0;
    for (int t = 0; t < 200; ++t) {
      double x = rng_uniform(152, 0, std::uint64_t(t), -1.5, 1.5);
      err = std::max(err, std::abs(interp_cubic(gg, vv, Vec::Constant(1, x)) - smooth(x)));
    }
    (pts == 33 ? err_coarse : err_fine) = err;
  }
  double order = std::log2(err_coarse / err_fine);
  CHECK(order >= 3.5);
  CHECK(order <= 4.6);
}

TEST_SUITE_END();
