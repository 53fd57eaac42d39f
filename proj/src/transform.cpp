#include "nilfourier/transform.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <limits>
#include <numbers>

#include "nilfourier/parallel.hpp"
#include "nilfourier/poly_bound.hpp"

namespace nilfourier {

LambdaSet LambdaSet::from_points(std::vector<Vec> pts) {
  LambdaSet s;
  s.points = std::move(pts);
  s.masked.assign(s.points.size(), 0);
  return s;
}

LambdaSet LambdaSet::from_grid(const GridSpec& g, const StructureConstants& sc,
                               const DualChart& chart) {
  if (g.dim() != chart.k) throw InputError("lambda grid dimension must equal the chart's k");
  LambdaSet s;
  s.grid = g;
  s.grid_structured = true;
  s.points.reserve(size_t(g.size()));
  s.masked.reserve(size_t(g.size()));
  for (std::int64_t i = 0; i < g.size(); ++i) {
    Vec lam = g.point(i);
    DensityValue dv = plancherel_density(sc, chart, lam);
    s.points.push_back(std::move(lam));
    s.masked.push_back(dv.non_generic ? 1 : 0);
  }
  return s;
}

LambdaSet LambdaSet::segment(double lo, double hi, int count) {
  if (count < 1) throw InputError("lambda segment needs at least one point");
  LambdaSet s;
  for (int i = 0; i < count; ++i) {
    Vec lam(1);
    lam[0] = (count == 1) ? lo : lo + (hi - lo) * double(i) / double(count - 1);
    s.points.push_back(std::move(lam));
  }
  s.masked.assign(s.points.size(), 0);
  return s;
}

double hs_norm_sq(const OperatorMatrix& op) {
  const GridSpec& xg = op.xgrid;
  double acc = 0.0;
  for (std::int64_t r = 0; r < op.mat.rows(); ++r) {
    double wr = xg.weight(r);
    for (std::int64_t c = 0; c < op.mat.cols(); ++c) {
      double a = std::abs(op.mat(r, c));
      if (a != 0.0) acc += wr * a * a / xg.weight(c);
    }
  }
  return acc;
}

namespace {

struct PhiSample {
  double g[kMaxDim];  // group element, exponential coordinates
  Complex wv;         // quadrature weight * phi value
};

// nonzero samples of phi as group elements with weights folded in
std::vector<PhiSample> phi_samples(const SampledGroupFunction& phi, const CosetGeometry& geo) {
  phi.validate();
  if (phi.grid.dim() != geo.dim())
    throw InputError("phi grid dimension does not match the group");
  std::vector<PhiSample> out;
  const int m = geo.dim_h(), q = geo.dim_x();
  Vec eta(m);
  XPoint x{Vec(q)};
  for (GridIter it(phi.grid); !it.done(); it.next()) {
    Complex v = phi.values[it.flat()];
    if (v == Complex(0.0, 0.0)) continue;
    for (int d = 0; d < m; ++d) eta[d] = phi.grid.axis(d).coord(it.idx()[size_t(d)]);
    for (int d = 0; d < q; ++d) x.coords[d] = phi.grid.axis(m + d).coord(it.idx()[size_t(m + d)]);
    GroupElement g = geo.malcev_point(eta, x);
    PhiSample s;
    for (int d = 0; d < geo.dim(); ++d) s.g[d] = g.coords[d];
    s.wv = phi.grid.weight(it.idx()) * v;
    out.push_back(s);
  }
  return out;
}

}  // namespace

std::vector<OperatorMatrix> group_fourier_direct(const SampledGroupFunction& phi,
                                                 const RepFamily& family, const GridSpec& xgrid,
                                                 const LambdaSet& lambdas, int workers) {
  const CosetGeometry& geo = *family.geo;
  const int n = geo.dim(), q = geo.dim_x(), k = family.chart.k;
  if (xgrid.dim() != q) throw InputError("group_fourier_direct: X-grid dimension mismatch");
  for (const Vec& lam : lambdas.points)
    if (lam.size() != k) throw InputError("group_fourier_direct: lambda dimension mismatch");

  std::vector<PhiSample> samples = phi_samples(phi, geo);
  const std::int64_t nx = xgrid.size();
  const std::int64_t nl = lambdas.size();

  std::vector<OperatorMatrix> ops(static_cast<size_t>(nl));
  for (std::int64_t l = 0; l < nl; ++l)
    ops[size_t(l)] = OperatorMatrix{lambdas.points[size_t(l)], CMat::Zero(nx, nx), xgrid};

  const Mat& embed = family.chart.embed;  // n x k

  parallel_for(nx, workers, [&](std::int64_t row) {
    double xc[kMaxDim], h_log[kMaxDim], xg[kMaxDim], c[kMaxDim];
    Eigen::Map<Vec> xg_vec(xg, q);
    std::vector<int> idx;
    xgrid.unflatten(row, idx);
    for (int d = 0; d < q; ++d) xc[d] = xgrid.axis(d).coord(idx[size_t(d)]);
    Stencil st;
    for (const PhiSample& s : samples) {
      geo.cocycle_log_raw(s.g, xc, h_log, xg);
      if (!interp_stencil(xgrid, xg_vec, st)) continue;
      for (int j = 0; j < k; ++j) {
        double acc = 0.0;
        for (int d = 0; d < n; ++d) acc += embed(d, j) * h_log[d];
        c[j] = acc;
      }
      for (std::int64_t l = 0; l < nl; ++l) {
        if (lambdas.masked[size_t(l)]) continue;
        const Vec& lam = lambdas.points[size_t(l)];
        double phase = 0.0;
        for (int j = 0; j < k; ++j) phase += lam[j] * c[j];
        Complex coeff = s.wv * Complex(std::cos(phase), std::sin(phase));
        CMat& mat = ops[size_t(l)].mat;
        for (int t = 0; t < st.count; ++t) mat(row, st.cols[t]) += coeff * st.w[t];
      }
    }
  });
  return ops;
}

// Enlarges phi's H-subgrid so that every eta whose slice image can land in
// phi's box is sampled: per axis, the half width grows by the sup of the
// displacement eta'_t - eta_t, rounded up to whole cells. The displacement
// of an axis depends only on shallower coordinates, so re-bounding over the
// grown box stabilizes after at most m passes.
GridSpec kernel_slice_grid(const SampledGroupFunction& phi, const CosetGeometry& geo,
                           const GridSpec& xgrid) {
  const int m = geo.dim_h(), q = geo.dim_x();
  std::vector<Axis> axes;
  for (int d = 0; d < m; ++d) axes.push_back(phi.grid.axis(d));

  auto displacement = [&](const Vec& in, Vec& out) {
    Vec eta = in.head(m);
    XPoint x1{in.segment(m, q)};
    XPoint x{in.tail(q)};
    GroupElement g = geo.malcev_point(eta, x);
    GroupElement s1 = geo.section(x1);
    GroupElement moved = geo.sc().mul(geo.sc().inv(s1), g);
    Vec eta2(m);
    XPoint x2;
    geo.malcev_coords(moved, eta2, x2);
    out = eta2 - eta;
  };

  for (int pass = 0; pass <= m + 1; ++pass) {
    std::vector<Interval> box;
    for (int d = 0; d < m; ++d) box.push_back({axes[size_t(d)].lo(), axes[size_t(d)].hi()});
    for (int side = 0; side < 2; ++side)
      for (int d = 0; d < q; ++d)
        box.push_back({xgrid.axis(d).lo(), xgrid.axis(d).hi()});
    Vec bound = polynomial_map_bound(displacement, box, geo.sc().step(), m);

    bool grew = false;
    for (int d = 0; d < m; ++d) {
      Axis& a = axes[size_t(d)];
      double needed = phi.grid.axis(d).half_width + bound[d];
      int extra = int(std::ceil((needed - a.half_width) / a.spacing() - 1e-9));
      if (extra > 0) {
        a.half_width += extra * a.spacing();
        a.points += 2 * extra;
        grew = true;
      }
    }
    if (!grew) return GridSpec(axes);
  }
  throw InternalError("slice grid enlargement did not stabilize");
}

KernelTensor kernel_tensor(const SampledGroupFunction& phi, const RepFamily& family,
                           const LambdaSet& lambdas, const GridSpec& xgrid, int workers) {
  const CosetGeometry& geo = *family.geo;
  const int m = geo.dim_h(), q = geo.dim_x(), n = geo.dim();
  if (xgrid.dim() != q) throw InputError("kernel_tensor: X-grid dimension mismatch");
  phi.validate();
  if (phi.grid.dim() != n) throw InputError("kernel_tensor: phi grid dimension mismatch");

  KernelTensor kt;
  kt.lambdas = lambdas;
  kt.xgrid = xgrid;
  kt.eta_grid = kernel_slice_grid(phi, geo, xgrid);
  const GridSpec& eg = kt.eta_grid;
  const std::int64_t ne = eg.size();
  const std::int64_t nx = xgrid.size();
  const std::int64_t nl = lambdas.size();

  // omega_t(lambda) = (h_basis^T embed . lambda)_t; reject frequencies beyond
  // the H-grid Nyquist limit.
  Mat freq_map = family.h_axis_freqs();  // m x k
  std::vector<Vec> omegas(static_cast<size_t>(nl));
  for (std::int64_t l = 0; l < nl; ++l) {
    omegas[size_t(l)] = freq_map * lambdas.points[size_t(l)];
    if (lambdas.masked[size_t(l)]) continue;
    for (int t = 0; t < m; ++t) {
      double nyq = std::numbers::pi / eg.axis(t).spacing();
      if (std::abs(omegas[size_t(l)][t]) > nyq)
        throw InputError("aliasing: lambda frequency " + std::to_string(omegas[size_t(l)][t]) +
                         " on H-axis " + std::to_string(t) + " exceeds the Nyquist limit " +
                         std::to_string(nyq) + " of the slice grid");
    }
  }

  // per-axis phase tables: P[t][l][j] = exp(i omega_t eta_j)
  std::vector<std::vector<CVec>> phases(static_cast<size_t>(m));
  for (int t = 0; t < m; ++t) {
    phases[size_t(t)].resize(size_t(nl));
    for (std::int64_t l = 0; l < nl; ++l) {
      CVec p(eg.axis(t).points);
      for (int j = 0; j < eg.axis(t).points; ++j) {
        double ph = omegas[size_t(l)][t] * eg.axis(t).coord(j);
        p[j] = Complex(std::cos(ph), std::sin(ph));
      }
      phases[size_t(t)][size_t(l)] = std::move(p);
    }
  }

  kt.k.assign(size_t(nl), CMat::Zero(nx, nx));
  kt.samples_total = ne * nx * nx;
  std::vector<std::int64_t> oob_per_row(size_t(nx), 0);

  parallel_for(nx, workers, [&](std::int64_t row) {
    // s(x1)^{-1} for this row
    std::vector<int> idx;
    xgrid.unflatten(row, idx);
    XPoint x1{Vec(q)};
    for (int d = 0; d < q; ++d) x1.coords[d] = xgrid.axis(d).coord(idx[size_t(d)]);
    GroupElement s1inv = geo.sc().inv(geo.section(x1));

    CVec psi(ne);
    CVec buf_a(ne), buf_b(ne);
    Vec mal(n);
    double etac[kMaxDim];
    std::int64_t oob = 0;

    for (std::int64_t col = 0; col < nx; ++col) {
      std::vector<int> cidx;
      xgrid.unflatten(col, cidx);
      XPoint x{Vec(q)};
      for (int d = 0; d < q; ++d) x.coords[d] = xgrid.axis(d).coord(cidx[size_t(d)]);
      GroupElement sx = geo.section(x);

      // psi(eta) = w_eta phi(s(x1)^{-1} exp(eta.u) s(x))
      for (GridIter it(eg); !it.done(); it.next()) {
        for (int t = 0; t < m; ++t) etac[t] = eg.axis(t).coord(it.idx()[size_t(t)]);
        // p = s1inv . exp(eta.u) . s(x)
        SVec p(n), tmp(n);
        p.noalias() = geo.pol().h_basis * Eigen::Map<const Vec>(etac, m);
        geo.sc().bch(p, sx.coords, tmp);
        geo.sc().bch(s1inv.coords, tmp, p);
        double eta2[kMaxDim], x2[kMaxDim];
        geo.factorize_raw(p.data(), eta2, x2, nullptr);
        for (int t = 0; t < m; ++t) mal[t] = eta2[t];
        for (int d = 0; d < q; ++d) mal[m + d] = x2[d];
        Complex v = interp_cubic(phi.grid, phi.values, mal, &oob);
        psi[it.flat()] = eg.weight(it.idx()) * v;
      }

      // separable contraction against the per-axis phases
      for (std::int64_t l = 0; l < nl; ++l) {
        if (lambdas.masked[size_t(l)]) continue;
        const CVec* src = &psi;
        CVec* dst = &buf_a;
        std::int64_t len = ne;
        for (int t = m - 1; t >= 0; --t) {
          const CVec& ph = phases[size_t(t)][size_t(l)];
          const std::int64_t np = eg.axis(t).points;
          const std::int64_t outer = len / np;
          for (std::int64_t u = 0; u < outer; ++u) {
            Complex acc(0.0, 0.0);
            const Complex* base = src->data() + u * np;
            for (std::int64_t j = 0; j < np; ++j) acc += base[j] * ph[j];
            (*dst)[u] = acc;
          }
          len = outer;
          src = dst;
          dst = (dst == &buf_a) ? &buf_b : &buf_a;
        }
        kt.k[size_t(l)](row, col) = (*src)[0];
      }
    }
    oob_per_row[size_t(row)] = oob;
  });

  for (std::int64_t r = 0; r < nx; ++r) kt.samples_out_of_box += oob_per_row[size_t(r)];
  return kt;
}

double KernelTensor::hs_norm(std::int64_t lambda_index) const {
  const CMat& mat = k[size_t(lambda_index)];
  double acc = 0.0;
  for (std::int64_t r = 0; r < mat.rows(); ++r) {
    double wr = xgrid.weight(r);
    for (std::int64_t c = 0; c < mat.cols(); ++c) {
      double a = std::abs(mat(r, c));
      if (a != 0.0) acc += wr * xgrid.weight(c) * a * a;
    }
  }
  return std::sqrt(acc);
}

OperatorMatrix operator_from_kernel(const KernelTensor& kt, std::int64_t lambda_index) {
  if (lambda_index < 0 || lambda_index >= std::int64_t(kt.k.size()))
    throw InputError("operator_from_kernel: lambda index out of range");
  OperatorMatrix op;
  op.lambda = kt.lambdas.points[size_t(lambda_index)];
  op.xgrid = kt.xgrid;
  op.mat = kt.k[size_t(lambda_index)];
  for (std::int64_t c = 0; c < op.mat.cols(); ++c) op.mat.col(c) *= kt.xgrid.weight(c);
  return op;
}

OperatorMatrix operator_from_kernel(const KernelTensor& kt, const Vec& lambda) {
  for (std::int64_t l = 0; l < kt.lambdas.size(); ++l) {
    if ((kt.lambdas.points[size_t(l)] - lambda).cwiseAbs().maxCoeff() == 0.0)
      return operator_from_kernel(kt, l);
  }
  throw InputError("operator_from_kernel: lambda is not on the tensor's lambda set");
}

PlancherelResult plancherel_check(const SampledGroupFunction& phi, const RepFamily& family,
                                  const LambdaSet& lambdas, const GridSpec& xgrid,
                                  int workers) {
  if (!lambdas.grid_structured)
    throw InputError("plancherel_check needs a grid-structured lambda set");
  std::vector<OperatorMatrix> ops = group_fourier_direct(phi, family, xgrid, lambdas, workers);

  PlancherelResult res;
  res.l2_norm_sq = phi.l2_norm_sq();
  const std::int64_t nl = lambdas.size();
  res.per_lambda_hs_sq = Vec::Zero(nl);
  res.per_lambda_density = Vec::Zero(nl);
  double integral = 0.0, boundary = 0.0;
  std::vector<int> idx;
  for (std::int64_t l = 0; l < nl; ++l) {
    if (lambdas.masked[size_t(l)]) continue;
    DensityValue dv = plancherel_density(family.geo->sc(), family.chart,
                                         lambdas.points[size_t(l)]);
    double hs2 = hs_norm_sq(ops[size_t(l)]);
    res.per_lambda_hs_sq[l] = hs2;
    res.per_lambda_density[l] = dv.r;
    lambdas.grid.unflatten(l, idx);
    double contrib = lambdas.grid.weight(idx) * dv.r * hs2;
    integral += contrib;
    if (lambdas.grid.on_boundary(idx)) boundary += contrib;
  }
  res.integral = integral;
  if (integral <= 0.0) {
    res.degenerate = true;
    res.ratio = std::numeric_limits<double>::quiet_NaN();
    return res;
  }
  res.ratio = res.l2_norm_sq / integral;
  res.tail_fraction = 8.0 * boundary / integral;
  res.tail_warning = res.tail_fraction >= 0.01;
  return res;
}

VanishingReport pw_scan(const KernelTensor& kt, const StructureConstants& sc,
                        const DualChart& chart, double eps_rel) {
  Vec norms = Vec::Zero(kt.lambdas.size());
  for (std::int64_t l = 0; l < kt.lambdas.size(); ++l)
    if (!kt.lambdas.masked[size_t(l)]) norms[l] = kt.hs_norm(l);
  return pw_scan_norms(kt.lambdas, norms, sc, chart, eps_rel);
}

VanishingReport pw_scan_norms(const LambdaSet& ls, const Vec& hs_norms,
                              const StructureConstants& sc, const DualChart& chart,
                              double eps_rel) {
  const std::int64_t nl = ls.size();
  if (hs_norms.size() != nl) throw InputError("pw_scan: norms and lambda set size mismatch");
  VanishingReport rep;
  rep.hs_norms = hs_norms;
  rep.below_eps.assign(size_t(nl), 0);
  for (std::int64_t l = 0; l < nl; ++l) {
    if (ls.masked[size_t(l)]) continue;
    rep.k_norm_max = std::max(rep.k_norm_max, rep.hs_norms[l]);
  }

  std::vector<double> density(size_t(nl), 0.0);
  for (std::int64_t l = 0; l < nl; ++l)
    if (!ls.masked[size_t(l)])
      density[size_t(l)] = plancherel_density(sc, chart, ls.points[size_t(l)]).r;

  if (!ls.grid_structured)
    throw InputError("pw_scan needs a grid-structured lambda set");
  const GridSpec& lg = ls.grid;
  const int kdim = lg.dim();
  for (int d = 0; d < kdim; ++d) rep.resolution = std::max(rep.resolution, lg.axis(d).spacing());

  std::vector<int> idx;
  for (std::int64_t l = 0; l < nl; ++l) {
    if (ls.masked[size_t(l)]) continue;
    lg.unflatten(l, idx);
    rep.total_measure += lg.weight(idx) * density[size_t(l)];
  }

  if (rep.k_norm_max == 0.0) {
    // the zero function: everything vanishes, the whole window is flagged
    for (std::int64_t l = 0; l < nl; ++l)
      if (!ls.masked[size_t(l)]) rep.below_eps[size_t(l)] = 1;
    rep.measure_estimate = rep.total_measure;
    rep.verdict = "zero function";
    return rep;
  }

  rep.eps_abs = eps_rel * rep.k_norm_max;
  for (std::int64_t l = 0; l < nl; ++l)
    if (!ls.masked[size_t(l)] && rep.hs_norms[l] < rep.eps_abs) rep.below_eps[size_t(l)] = 1;

  // cells all of whose 2^kdim corners vanish contribute their R-weighted
  // volume; isolated below-eps points carry no measure at this resolution
  double cell_vol = 1.0;
  for (int d = 0; d < kdim; ++d) cell_vol *= lg.axis(d).spacing();
  std::vector<int> cidx(size_t(kdim), 0);
  bool more = kdim > 0;
  while (more) {
    bool all_below = true;
    double rsum = 0.0;
    int corners = 1 << kdim;
    for (int c = 0; c < corners && all_below; ++c) {
      std::vector<int> corner = cidx;
      for (int d = 0; d < kdim; ++d)
        if (c & (1 << d)) corner[size_t(d)] += 1;
      std::int64_t flat = lg.flatten(corner);
      if (ls.masked[size_t(flat)] || !rep.below_eps[size_t(flat)])
        all_below = false;
      else
        rsum += density[size_t(flat)];
    }
    if (all_below) rep.measure_estimate += cell_vol * rsum / double(1 << kdim);
    // advance cell index; cells span [i, i+1] per axis
    int d = kdim - 1;
    for (; d >= 0; --d) {
      if (++cidx[size_t(d)] < lg.axis(d).points - 1) break;
      cidx[size_t(d)] = 0;
    }
    if (d < 0) more = false;
  }

  rep.verdict = (rep.measure_estimate == 0.0) ? "consistent" : "inconsistent";
  return rep;
}

std::vector<SingularValueRow> invertibility_probe(const std::vector<OperatorMatrix>& ops,
                                                  const LambdaSet& lambdas, double tol) {
  std::vector<SingularValueRow> rows;
  rows.reserve(ops.size());
  for (size_t i = 0; i < ops.size(); ++i) {
    SingularValueRow row;
    row.lambda = ops[i].lambda;
    row.masked = i < lambdas.masked.size() && lambdas.masked[i];
    if (!row.masked) {
      const GridSpec& xg = ops[i].xgrid;
      const std::int64_t nx = ops[i].mat.rows();
      // conjugate into the weighted inner product: D^{1/2} M D^{-1/2}
      CMat w = ops[i].mat;
      for (std::int64_t r = 0; r < nx; ++r) {
        double sr = std::sqrt(xg.weight(r));
        for (std::int64_t c = 0; c < nx; ++c) w(r, c) *= sr / std::sqrt(xg.weight(c));
      }
      Eigen::BDCSVD<CMat> svd(w);
      const Vec& sv = svd.singularValues();
      row.sigma_max = sv.size() ? sv[0] : 0.0;
      row.sigma_min = sv.size() ? sv[sv.size() - 1] : 0.0;
      for (int s = 0; s < sv.size(); ++s)
        if (sv[s] > 1e-10 * row.sigma_max) ++row.rank;
      if (row.sigma_max == 0.0) row.rank = 0;
      row.near_singular = row.sigma_min < tol * row.sigma_max;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

Complex eval_phi(const SampledGroupFunction& phi, const CosetGeometry& geo,
                 const GroupElement& g, std::int64_t* out_of_box) {
  Vec mal = geo.malcev_coords(g);
  return interp_cubic(phi.grid, phi.values, mal, out_of_box);
}

SampledGroupFunction convolve(const SampledGroupFunction& phi1, const SampledGroupFunction& phi2,
                              const CosetGeometry& geo, int workers) {
  phi1.validate();
  phi2.validate();
  if (!(phi1.grid == phi2.grid)) throw InputError("convolve: functions must share one grid");
  const GridSpec& grid = phi1.grid;
  const int n = geo.dim(), m = geo.dim_h(), q = geo.dim_x();
  if (grid.dim() != n) throw InputError("convolve: grid dimension mismatch");

  // verify the declared supports and bound the product support
  auto check_support = [](const SampledGroupFunction& f) {
    double scale = f.max_abs();
    if (scale == 0.0) return;
    std::vector<int> idx;
    Vec p(f.grid.dim());
    for (GridIter it(f.grid); !it.done(); it.next()) {
      if (std::abs(f.values[it.flat()]) <= 1e-14 * scale) continue;
      f.grid.point(it.idx(), p);
      for (int d = 0; d < f.grid.dim(); ++d) {
        const Interval& s = f.support[size_t(d)];
        if (p[d] < s.lo - 1e-12 || p[d] > s.hi + 1e-12)
          throw InputError("convolve: values violate the declared support box");
      }
    }
  };
  check_support(phi1);
  check_support(phi2);

  std::vector<Interval> box;
  for (int d = 0; d < n; ++d) box.push_back(phi1.support[size_t(d)]);
  for (int d = 0; d < n; ++d) box.push_back(phi2.support[size_t(d)]);
  auto product_coords = [&](const Vec& in, Vec& out) {
    GroupElement a = geo.malcev_point(in.head(n));
    GroupElement b = geo.malcev_point(in.tail(n));
    out = geo.malcev_coords(geo.sc().mul(a, b));
  };
  // bound[d] >= sup |coordinate d| of products of support points
  Vec bound = polynomial_map_bound(product_coords, box, geo.sc().step(), n);
  for (int d = 0; d < n; ++d) {
    const Axis& a = grid.axis(d);
    double room = std::min(a.hi(), -a.lo()) - a.spacing();  // keep a boundary layer
    if (bound[d] > room)
      throw InputError("convolve: product support overflows the grid box on axis " +
                       std::to_string(d) + ": support bound " + std::to_string(bound[d]) +
                       " exceeds the available half width " + std::to_string(room));
  }

  SampledGroupFunction out;
  out.grid = grid;
  out.values = CVec::Zero(grid.size());
  out.support.resize(size_t(n));
  for (int d = 0; d < n; ++d) {
    double hw = std::max(bound[d], grid.axis(d).spacing());
    out.support[size_t(d)] = {-hw, hw};
  }

  std::vector<PhiSample> samples = phi_samples(phi1, geo);
  const std::int64_t ng = grid.size();
  parallel_for(ng, workers, [&](std::int64_t flat) {
    std::vector<int> idx;
    grid.unflatten(flat, idx);
    Vec mal(n);
    grid.point(idx, mal);
    GroupElement g = geo.malcev_point(mal);
    Complex acc(0.0, 0.0);
    Vec mal2(n);
    for (const PhiSample& s : samples) {
      // g'^{-1} g
      SVec gp(n);
      for (int d = 0; d < n; ++d) gp[d] = -s.g[d];
      SVec prod(n);
      geo.sc().bch(gp, g.coords, prod);
      double eta2[kMaxDim], x2[kMaxDim];
      geo.factorize_raw(prod.data(), eta2, x2, nullptr);
      for (int t = 0; t < m; ++t) mal2[t] = eta2[t];
      for (int d = 0; d < q; ++d) mal2[m + d] = x2[d];
      acc += s.wv * interp_cubic(phi2.grid, phi2.values, mal2, nullptr);
    }
    out.values[flat] = acc;
  });

  // quadrature dust outside the bounded support would violate the boundary
  // invariant; clip exact zeros there
  Vec p(n);
  for (GridIter it(grid); !it.done(); it.next()) {
    grid.point(it.idx(), p);
    for (int d = 0; d < n; ++d) {
      if (p[d] < out.support[size_t(d)].lo - 1e-12 || p[d] > out.support[size_t(d)].hi + 1e-12) {
        out.values[it.flat()] = Complex(0.0, 0.0);
        break;
      }
    }
  }
  out.validate();
  return out;
}

}  // namespace nilfourier
