#include "nilfourier/catalog.hpp"

#include <cmath>

namespace nilfourier {

CVec apply_oracle(const OracleAction& a, const GridSpec& xgrid, const CVec& f) {
  if (f.size() != xgrid.size()) throw InputError("apply_oracle: sampled function size mismatch");
  const int q = xgrid.dim();
  CVec out(f.size());
  Vec xi(q), moved(q);
  for (GridIter it(xgrid); !it.done(); it.next()) {
    xgrid.point(it.idx(), xi);
    double phase = a.const_phase + a.xi_phase.dot(xi);
    moved = xi + a.shift;
    out[it.flat()] = Complex(std::cos(phase), std::sin(phase)) *
                     interp_cubic(xgrid, f, moved, nullptr);
  }
  return out;
}

GroupBundle make_bundle(std::string name, std::shared_ptr<const StructureConstants> sc,
                        Mat flag, DualChart chart) {
  GroupBundle b;
  b.name = std::move(name);
  b.sc = std::move(sc);
  b.flag = std::move(flag);

  double flag_res = b.sc->flag_ideal_residual(b.flag);
  if (flag_res > 1e-10)
    throw InputError("group '" + b.name + "': flag is not an ideal flag (residual " +
                     std::to_string(flag_res) + ")");

  if (chart.embed.rows() != b.sc->dim() || chart.embed.cols() != chart.k)
    throw InputError("group '" + b.name + "': chart embed matrix must be n x k");
  if (chart.reference_lambda.size() != chart.k)
    throw InputError("group '" + b.name + "': chart reference point must have length k");

  // chart dimension must match the generic orbit dimension: k = n - rank(B)
  Mat bref = skew_form(*b.sc, chart.at(chart.reference_lambda));
  int orbit_dim = skew_rank(bref);
  if (chart.k != b.sc->dim() - orbit_dim)
    throw InputError("group '" + b.name + "': chart k = " + std::to_string(chart.k) +
                     " but n - max orbit dimension = " +
                     std::to_string(b.sc->dim() - orbit_dim));

  if (chart.pfaff_complement.empty() && orbit_dim > 0)
    chart.pfaff_complement = choose_pfaff_complement(*b.sc, chart);
  b.chart = chart;

  DensityValue dv = plancherel_density(*b.sc, b.chart, b.chart.reference_lambda);
  if (dv.non_generic || dv.r <= 0.0)
    throw InputError("group '" + b.name + "': chart reference point is not generic");

  b.family = make_rep_family(b.sc, b.chart, b.flag);
  return b;
}

namespace {

GridSpec uniform_grid(int dims, double half_width, int points, double center = 0.0) {
  std::vector<Axis> axes;
  for (int d = 0; d < dims; ++d) axes.push_back({center, half_width, points});
  return GridSpec(axes);
}

std::vector<Vec> segment_lambdas(double lo, double hi, int count) {
  std::vector<Vec> out;
  for (int i = 0; i < count; ++i) {
    Vec lam(1);
    lam[0] = lo + (hi - lo) * double(i) / double(count - 1);
    out.push_back(std::move(lam));
  }
  return out;
}

GroupBundle build_abelian1() {
  auto sc = std::make_shared<StructureConstants>(1, std::vector<BracketEntry>{}, "abelian1");
  Mat flag = Mat::Identity(1, 1);
  DualChart chart;
  chart.k = 1;
  chart.embed = Mat::Identity(1, 1);
  chart.reference_lambda = Vec::Ones(1);
  GroupBundle b = make_bundle("abelian1", sc, flag, chart);
  b.g_grid = uniform_grid(1, 2.0, 257);
  b.x_grid = GridSpec{};
  b.lambda_grid = uniform_grid(1, 4.0, 33);
  b.lambda_plancherel = uniform_grid(1, 24.0, 257);
  b.x_plancherel = GridSpec{};
  b.route_lambdas = segment_lambdas(0.5, 4.0, 8);
  b.has_oracle = true;
  return b;
}

GroupBundle build_abelian2() {
  auto sc = std::make_shared<StructureConstants>(2, std::vector<BracketEntry>{}, "abelian2");
  Mat flag = Mat::Identity(2, 2);
  DualChart chart;
  chart.k = 2;
  chart.embed = Mat::Identity(2, 2);
  chart.reference_lambda = Vec::Ones(2);
  GroupBundle b = make_bundle("abelian2", sc, flag, chart);
  b.g_grid = uniform_grid(2, 2.0, 65);
  b.x_grid = GridSpec{};
  b.lambda_grid = uniform_grid(2, 4.0, 17);
  b.lambda_plancherel = uniform_grid(2, 12.0, 65);
  b.x_plancherel = GridSpec{};
  {
    Vec a(2), c(2);
    a << 1.0, 0.5;
    c << 2.0, -1.0;
    b.route_lambdas = {a, c};
  }
  b.has_oracle = true;
  return b;
}

GroupBundle build_heisenberg() {
  // basis (X, Y, Z), [X, Y] = Z
  std::vector<BracketEntry> br;
  {
    BracketEntry e;
    e.i = 0;
    e.j = 1;
    e.coeffs = Vec::Zero(3);
    e.coeffs[2] = 1.0;
    br.push_back(e);
  }
  auto sc = std::make_shared<StructureConstants>(3, br, "heisenberg");
  // flag Z < {Y, Z} < g; this ordering selects h = span{Y, Z} and the
  // position-shift realization on L2(R)
  Mat flag(3, 3);
  flag.col(0) = Vec::Unit(3, 2);
  flag.col(1) = Vec::Unit(3, 1);
  flag.col(2) = Vec::Unit(3, 0);
  DualChart chart;
  chart.k = 1;
  chart.embed = Mat::Zero(3, 1);
  chart.embed(2, 0) = 1.0;  // l(lambda) = lambda Z*
  chart.reference_lambda = Vec::Ones(1);
  chart.pfaff_complement = {0, 1};  // B restricted to (X, Y): Pf = lambda
  GroupBundle b = make_bundle("heisenberg", sc, flag, chart);
  b.g_grid = uniform_grid(3, 2.0, 33);
  b.x_grid = uniform_grid(1, 3.0, 129);
  b.lambda_grid = uniform_grid(1, 4.0, 33);
  b.lambda_plancherel = uniform_grid(1, 6.0, 33);
  b.x_plancherel = uniform_grid(1, 12.0, 257);
  b.route_lambdas = segment_lambdas(0.5, 4.0, 8);
  b.has_oracle = true;
  return b;
}

GroupBundle build_engel() {
  // basis (X1, X2, X3, X4), [X1, X2] = X3, [X1, X3] = X4
  std::vector<BracketEntry> br(2);
  br[0].i = 0;
  br[0].j = 1;
  br[0].coeffs = Vec::Zero(4);
  br[0].coeffs[2] = 1.0;
  br[1].i = 0;
  br[1].j = 2;
  br[1].coeffs = Vec::Zero(4);
  br[1].coeffs[3] = 1.0;
  auto sc = std::make_shared<StructureConstants>(4, br, "engel");
  // flag X4 < {X3, X4} < {X2, X3, X4} < g
  Mat flag(4, 4);
  flag.col(0) = Vec::Unit(4, 3);
  flag.col(1) = Vec::Unit(4, 2);
  flag.col(2) = Vec::Unit(4, 1);
  flag.col(3) = Vec::Unit(4, 0);
  DualChart chart;
  chart.k = 2;
  chart.embed = Mat::Zero(4, 2);
  chart.embed(3, 0) = 1.0;  // l(lambda) = lambda_1 X4* + lambda_2 X2*
  chart.embed(1, 1) = 1.0;
  chart.reference_lambda = Vec(2);
  chart.reference_lambda << 1.0, 0.5;
  chart.pfaff_complement = {0, 2};  // B restricted to (X1, X3): Pf = lambda_1
  GroupBundle b = make_bundle("engel", sc, flag, chart);
  b.g_grid = uniform_grid(4, 1.5, 13);
  b.x_grid = uniform_grid(1, 2.0, 21);
  {
    std::vector<Axis> axes = {{0.0, 3.0, 9}, {0.0, 3.0, 9}};
    b.lambda_grid = GridSpec(axes);
    b.lambda_plancherel = b.lambda_grid;
  }
  b.x_plancherel = uniform_grid(1, 6.0, 65);
  {
    Vec a(2), c(2);
    a << 1.0, 0.5;
    c << 2.0, -1.0;
    b.route_lambdas = {a, c};
  }
  b.has_oracle = false;
  return b;
}

}  // namespace

const std::vector<std::string>& catalog_names() {
  static const std::vector<std::string> names = {"abelian1", "abelian2", "heisenberg", "engel"};
  return names;
}

GroupBundle get_group(const std::string& name) {
  if (name == "abelian1") return build_abelian1();
  if (name == "abelian2") return build_abelian2();
  if (name == "heisenberg") return build_heisenberg();
  if (name == "engel") return build_engel();
  std::string msg = "unknown group '" + name + "'; available presets:";
  for (const auto& n : catalog_names()) msg += " " + n;
  throw InputError(msg);
}

OracleAction GroupBundle::oracle(const Vec& lambda, const GroupElement& g) const {
  if (!has_oracle)
    throw InputError("no oracle for group '" + name + "'");
  if (lambda.size() != chart.k) throw InputError("oracle: lambda dimension mismatch");
  if (g.coords.size() != sc->dim()) throw InputError("oracle: element dimension mismatch");
  OracleAction a;
  if (name == "heisenberg") {
    // Derived from this artifact's own conventions (see
    // docs/heisenberg_realization.md): for g = (x', y', t'),
    // [pi_lambda(g) f](xi) = exp(i lambda (t' + x' y' / 2 + xi y')) f(xi + x').
    double lam = lambda[0];
    double xp = g.coords[0], yp = g.coords[1], tp = g.coords[2];
    a.const_phase = lam * (tp + 0.5 * xp * yp);
    a.xi_phase = Vec::Constant(1, lam * yp);
    a.shift = Vec::Constant(1, xp);
    return a;
  }
  // abelian presets: X is a point, pi_lambda(g) = exp(i <l(lambda), g>)
  a.const_phase = chart.at(lambda).pair(g.coords);
  a.xi_phase = Vec(0);
  a.shift = Vec(0);
  return a;
}

}  // namespace nilfourier
