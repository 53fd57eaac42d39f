#include "nilfourier/induced.hpp"

#include <cmath>

namespace nilfourier {

CosetGeometry::CosetGeometry(std::shared_ptr<const StructureConstants> sc, Polarization pol)
    : sc_(std::move(sc)), pol_(std::move(pol)) {
  const int n = sc_->dim();
  if (pol_.h_basis.rows() != n) throw InputError("coset geometry: dimension mismatch");
  to_flag_ = pol_.flag.inverse();

  slot_of_flag_.assign(size_t(n), -1);
  slot_is_h_.assign(size_t(n), false);
  for (size_t t = 0; t < pol_.h_flag_indices.size(); ++t) {
    slot_of_flag_[size_t(pol_.h_flag_indices[t])] = int(t);
    slot_is_h_[size_t(pol_.h_flag_indices[t])] = true;
  }
  for (size_t r = 0; r < pol_.comp_flag_indices.size(); ++r)
    slot_of_flag_[size_t(pol_.comp_flag_indices[r])] = int(r);

  // orthonormal h basis for membership tests
  SpanBasis span(n);
  for (int c = 0; c < pol_.h_basis.cols(); ++c) span.try_add(pol_.h_basis.col(c));
  h_ortho_ = span.basis();
}

namespace {

// p <- p . exp(x_r W_r) chain over the complement factors
inline void append_section_factors(const StructureConstants& sc, const Mat& comp,
                                   const double* x, int q, SVec& p, SVec& tmp, SVec& w) {
  for (int r = 0; r < q; ++r) {
    w = x[r] * comp.col(r);
    sc.bch(p, w, tmp);
    p.swap(tmp);
  }
}

}  // namespace

GroupElement CosetGeometry::section(const XPoint& x) const {
  const int q = dim_x();
  if (x.coords.size() != q) throw InputError("section: x has wrong dimension");
  SVec p = SVec::Zero(dim()), tmp(dim()), w(dim());
  append_section_factors(*sc_, pol_.complement, x.coords.data(), q, p, tmp, w);
  return GroupElement{Vec(p)};
}

GroupElement CosetGeometry::malcev_point(const Vec& eta, const XPoint& x) const {
  const int m = dim_h();
  if (eta.size() != m) throw InputError("malcev_point: eta has wrong dimension");
  if (x.coords.size() != dim_x()) throw InputError("malcev_point: x has wrong dimension");
  SVec p(dim()), tmp(dim()), w(dim());
  p.noalias() = pol_.h_basis * eta;
  append_section_factors(*sc_, pol_.complement, x.coords.data(), dim_x(), p, tmp, w);
  return GroupElement{Vec(p)};
}

GroupElement CosetGeometry::malcev_point(const Vec& combined) const {
  const int m = dim_h();
  if (combined.size() != dim()) throw InputError("malcev_point: bad coordinate length");
  return malcev_point(combined.head(m), XPoint{combined.tail(dim_x())});
}

void CosetGeometry::factorize_raw(const double* g_coords, double* eta, double* x,
                                  double* h_log) const {
  const int n = dim();
  const int m = dim_h();
  const int q = dim_x();

  SVec gf(n);
  {
    Eigen::Map<const Vec> g(g_coords, n);
    gf.noalias() = to_flag_ * g;
  }
  SVec ev = SVec::Zero(m);
  SVec p(n), pf(n), tmp(n), w(n);
  double xv[kMaxDim] = {0.0};

  // The flag coordinate j of h(eta) . s(x) equals (unknown attached at j)
  // plus a polynomial in the unknowns attached at flag positions > j, so a
  // single sweep from the shallow end solves the system exactly.
  for (int j = n - 1; j >= -1; --j) {
    if (m > 0)
      p.noalias() = pol_.h_basis * ev;
    else
      p.setZero(n);
    append_section_factors(*sc_, pol_.complement, xv, q, p, tmp, w);
    pf.noalias() = to_flag_ * p;
    if (j < 0) break;  // last pass recomputed the product for the residual check
    double corr = gf[j] - pf[j];
    int slot = slot_of_flag_[size_t(j)];
    if (slot_is_h_[size_t(j)])
      ev[slot] += corr;
    else
      xv[slot] += corr;
  }

  double res = (pf - gf).cwiseAbs().maxCoeff();
  if (res > 1e-8 * std::max(1.0, gf.cwiseAbs().maxCoeff()))
    throw InternalError("complement is not coexponential (factorize residual " +
                        std::to_string(res) + ")");

  if (eta)
    for (int t = 0; t < m; ++t) eta[t] = ev[t];
  if (x)
    for (int r = 0; r < q; ++r) x[r] = xv[r];
  if (h_log) {
    Eigen::Map<Vec> hl(h_log, n);
    if (m > 0)
      hl.noalias() = pol_.h_basis * ev;
    else
      hl.setZero();
  }
}

Factorization CosetGeometry::factorize(const GroupElement& g) const {
  if (g.coords.size() != dim()) throw InputError("factorize: element dimension mismatch");
  Factorization f;
  f.h.coords.resize(dim());
  f.x.coords.resize(dim_x());
  factorize_raw(g.coords.data(), nullptr, f.x.coords.data(), f.h.coords.data());
  return f;
}

void CosetGeometry::cocycle_log_raw(const double* g_coords, const double* x_coords,
                                    double* h_log, double* xg) const {
  const int n = dim();
  const int q = dim_x();
  SVec p = SVec::Zero(n), tmp(n), w(n);
  double xv[kMaxDim];
  for (int r = 0; r < q; ++r) xv[r] = x_coords[r];
  append_section_factors(*sc_, pol_.complement, xv, q, p, tmp, w);  // s(x)
  Eigen::Map<const Vec> g(g_coords, n);
  sc_->bch(p, g, tmp);  // s(x) . g
  p.swap(tmp);
  factorize_raw(p.data(), nullptr, xg, h_log);
}

void CosetGeometry::cocycle_log(const GroupElement& g, const XPoint& x, Vec& log_h,
                                XPoint& xg) const {
  if (g.coords.size() != dim()) throw InputError("cocycle: element dimension mismatch");
  if (x.coords.size() != dim_x()) throw InputError("cocycle: x dimension mismatch");
  log_h.resize(dim());
  xg.coords.resize(dim_x());
  cocycle_log_raw(g.coords.data(), x.coords.data(), log_h.data(), xg.coords.data());
}

void CosetGeometry::malcev_coords(const GroupElement& g, Vec& eta, XPoint& x) const {
  if (g.coords.size() != dim()) throw InputError("malcev_coords: element dimension mismatch");
  eta.resize(dim_h());
  x.coords.resize(dim_x());
  factorize_raw(g.coords.data(), eta.data(), x.coords.data(), nullptr);
}

Vec CosetGeometry::malcev_coords(const GroupElement& g) const {
  Vec eta;
  XPoint x;
  malcev_coords(g, eta, x);
  Vec out(dim());
  out << eta, x.coords;
  return out;
}

double CosetGeometry::h_membership_residual(const Vec& v) const {
  Vec r = v;
  if (h_ortho_.cols() > 0) r -= h_ortho_ * (h_ortho_.transpose() * v);
  return r.norm();
}

Complex InducedRep::character(const GroupElement& h) const {
  double res = geo_->h_membership_residual(h.coords);
  if (res > 1e-8 * std::max(1.0, h.coords.norm()))
    throw InputError("character: element is not in H (residual " + std::to_string(res) + ")");
  double phase = l_.pair(h.coords);
  return Complex(std::cos(phase), std::sin(phase));
}

std::pair<Complex, XPoint> InducedRep::cocycle(const GroupElement& g, const XPoint& x) const {
  Vec log_h;
  XPoint xg;
  geo_->cocycle_log(g, x, log_h, xg);
  double phase = l_.pair(log_h);
  return {Complex(std::cos(phase), std::sin(phase)), std::move(xg)};
}

CVec InducedRep::act(const GroupElement& g, const GridSpec& xgrid, const CVec& f,
                     ActStats* stats) const {
  const int q = geo_->dim_x();
  if (xgrid.dim() != q) throw InputError("act: X-grid dimension mismatch");
  if (f.size() != xgrid.size()) throw InputError("act: sampled function size mismatch");
  CVec out(f.size());
  double h_log[kMaxDim], xg[kMaxDim], xcoord[kMaxDim];
  Eigen::Map<Vec> xg_vec(xg, q);
  std::int64_t oob = 0;
  for (GridIter it(xgrid); !it.done(); it.next()) {
    for (int d = 0; d < q; ++d) xcoord[d] = xgrid.axis(d).coord(it.idx()[size_t(d)]);
    geo_->cocycle_log_raw(g.coords.data(), xcoord, h_log, xg);
    double phase = 0.0;
    for (int d = 0; d < geo_->dim(); ++d) phase += l_.covector[d] * h_log[d];
    Complex a(std::cos(phase), std::sin(phase));
    out[it.flat()] = a * interp_cubic(xgrid, f, xg_vec, &oob);
  }
  if (stats) stats->out_of_box += oob;
  return out;
}

CMat InducedRep::act_matrix(const GroupElement& g, const GridSpec& xgrid) const {
  const int q = geo_->dim_x();
  if (xgrid.dim() != q) throw InputError("act_matrix: X-grid dimension mismatch");
  const std::int64_t nx = xgrid.size();
  CMat mat = CMat::Zero(nx, nx);
  double h_log[kMaxDim], xg[kMaxDim], xcoord[kMaxDim];
  Eigen::Map<Vec> xg_vec(xg, q);
  Stencil st;
  for (GridIter it(xgrid); !it.done(); it.next()) {
    for (int d = 0; d < q; ++d) xcoord[d] = xgrid.axis(d).coord(it.idx()[size_t(d)]);
    geo_->cocycle_log_raw(g.coords.data(), xcoord, h_log, xg);
    double phase = 0.0;
    for (int d = 0; d < geo_->dim(); ++d) phase += l_.covector[d] * h_log[d];
    Complex a(std::cos(phase), std::sin(phase));
    if (!interp_stencil(xgrid, xg_vec, st)) continue;
    for (int t = 0; t < st.count; ++t) mat(it.flat(), st.cols[t]) += a * st.w[t];
  }
  return mat;
}

Mat RepFamily::h_axis_freqs() const {
  return geo->pol().h_basis.transpose() * chart.embed;  // m x k
}

RepFamily make_rep_family(std::shared_ptr<const StructureConstants> sc, const DualChart& chart,
                          const Mat& flag) {
  Polarization pol = vergne_polarization(*sc, chart.at(chart.reference_lambda), flag);
  auto geo = std::make_shared<CosetGeometry>(sc, std::move(pol));
  return RepFamily{std::move(geo), chart};
}

}  // namespace nilfourier
