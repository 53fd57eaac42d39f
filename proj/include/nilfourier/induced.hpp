#pragma once

#include <complex>
#include <memory>

#include "nilfourier/orbits.hpp"

namespace nilfourier {

/// Point of the homogeneous space X = H\G in coexponential coordinates along
/// the polarization's complement basis. May have zero coordinates (X a point).
struct XPoint {
  Vec coords;
};

/// g = h . s(x) with h in H.
struct Factorization {
  GroupElement h;
  XPoint x;
};

/// Coordinate machinery of the coset space H\G for a fixed polarizing
/// subalgebra: the Malcev section s, the H x X factorization, and the Malcev
/// coordinate chart (eta, x) -> exp(eta . u) . s(x) used for sampling
/// functions on G. Everything here is independent of the character, so one
/// geometry is shared by the whole family of representations over a dual
/// chart. Immutable and thread-safe.
class CosetGeometry {
 public:
  CosetGeometry(std::shared_ptr<const StructureConstants> sc, Polarization pol);

  const StructureConstants& sc() const { return *sc_; }
  std::shared_ptr<const StructureConstants> sc_ptr() const { return sc_; }
  const Polarization& pol() const { return pol_; }
  int dim() const { return sc_->dim(); }
  int dim_h() const { return pol_.dim_h(); }
  int dim_x() const { return pol_.dim_x(); }

  /// s(x) = exp(x_1 W_1) ... exp(x_q W_q) over the ordered complement basis.
  GroupElement section(const XPoint& x) const;

  /// Unique (h, x) with g = h . s(x), solved by back-substitution through the
  /// flag coordinates (the system is unitriangular in flag order). Throws
  /// InternalError("complement is not coexponential") if the residual after
  /// the sweep exceeds 1e-8.
  Factorization factorize(const GroupElement& g) const;

  /// H-part logarithm and X-part of s(x) . g; the h whose character value is
  /// the cocycle A(g, x), and the translated point x . g.
  void cocycle_log(const GroupElement& g, const XPoint& x, Vec& log_h, XPoint& xg) const;

  /// Malcev chart of G adapted to the polarization:
  /// (eta, x) -> exp(sum eta_t u_t) . s(x). Pushes Lebesgue measure to Haar.
  GroupElement malcev_point(const Vec& eta, const XPoint& x) const;
  GroupElement malcev_point(const Vec& combined) const;  // first m = eta, rest = x
  void malcev_coords(const GroupElement& g, Vec& eta, XPoint& x) const;
  Vec malcev_coords(const GroupElement& g) const;  // combined (eta, x)

  /// Allocation-free variants for assembly hot loops. Output pointers may be
  /// null when a component is not needed; h_log has length n, eta length m,
  /// x and xg length n-m.
  void factorize_raw(const double* g_coords, double* eta, double* x, double* h_log) const;
  void cocycle_log_raw(const double* g_coords, const double* x_coords, double* h_log,
                       double* xg) const;

  /// Residual of v against span(h_basis); membership test for H.
  double h_membership_residual(const Vec& v) const;

 private:
  std::shared_ptr<const StructureConstants> sc_;
  Polarization pol_;
  Mat to_flag_;              // flag^{-1}
  Mat h_ortho_;              // orthonormalized h basis for membership tests
  std::vector<int> slot_of_flag_;   // flag index -> unknown slot (h slot or x slot)
  std::vector<bool> slot_is_h_;
};

struct ActStats {
  std::int64_t out_of_box = 0;
};

/// One irreducible induced representation: a coset geometry plus the
/// character functional l (subordinate to the polarization).
class InducedRep {
 public:
  InducedRep(std::shared_ptr<const CosetGeometry> geo, LinearFunctional l)
      : geo_(std::move(geo)), l_(std::move(l)) {
    if (l_.covector.size() != geo_->dim())
      throw InputError("induced representation: functional dimension mismatch");
  }

  const CosetGeometry& geometry() const { return *geo_; }
  std::shared_ptr<const CosetGeometry> geometry_ptr() const { return geo_; }
  const LinearFunctional& l() const { return l_; }
  int dim_x() const { return geo_->dim_x(); }

  /// pi_0(h) = exp(i <l, log h>) for h in H. Throws InputError when h's
  /// coordinates leave span(h) by more than 1e-8.
  Complex character(const GroupElement& h) const;

  /// (A(g, x), x . g) where A(g, x) = pi_0(h), h s(x g) = s(x) g.
  std::pair<Complex, XPoint> cocycle(const GroupElement& g, const XPoint& x) const;

  /// [pi(g) f](x) = A(g, x) f(x g) on a sampled X-grid; f is read by cubic
  /// interpolation and treated as zero outside its box.
  CVec act(const GroupElement& g, const GridSpec& xgrid, const CVec& f,
           ActStats* stats = nullptr) const;

  /// Dense matrix of act(g, .) on the X-grid (column stencils of the
  /// interpolation, phases on the rows).
  CMat act_matrix(const GroupElement& g, const GridSpec& xgrid) const;

 private:
  std::shared_ptr<const CosetGeometry> geo_;
  LinearFunctional l_;
};

/// The representations pi_lambda over a dual chart, sharing one geometry.
struct RepFamily {
  std::shared_ptr<const CosetGeometry> geo;
  DualChart chart;

  InducedRep at(const Vec& lambda) const { return InducedRep(geo, chart.at(lambda)); }
  /// Per-H-axis frequency coefficients: omega_t(lambda) = kappa_t . lambda.
  Mat h_axis_freqs() const;  // m x k
};

/// Builds the family over a chart: Vergne polarization at the chart's
/// reference point, shared geometry.
RepFamily make_rep_family(std::shared_ptr<const StructureConstants> sc, const DualChart& chart,
                          const Mat& flag);

}  // namespace nilfourier
