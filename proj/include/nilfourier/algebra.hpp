#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "nilfourier/errors.hpp"
#include "nilfourier/grid.hpp"

namespace nilfourier {

/// Stack-allocated small vector for hot loops; algebra dimensions are capped
/// at kMaxDim.
constexpr int kMaxDim = 8;
using SVec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::AutoAlign, kMaxDim, 1>;

/// Coefficient vector in the chosen algebra basis.
struct AlgebraElement {
  Vec coords;
};

/// Group element in exponential coordinates: the point exp(sum coords[i] e_i).
/// The coordinates ARE the logarithm.
struct GroupElement {
  Vec coords;
};

/// Element of the dual space; pairing <l, A> = covector . A.coords.
struct LinearFunctional {
  Vec covector;
  double pair(const Vec& a) const { return covector.dot(a); }
  double pair(const AlgebraElement& a) const { return covector.dot(a.coords); }
};

struct BracketEntry {
  int i = 0;
  int j = 0;       // i < j
  Vec coeffs;      // coefficient of e_k in [e_i, e_j]
};

/// A nilpotent Lie algebra presented by its structure constants, together
/// with the polynomial group law of the associated simply connected group in
/// exponential coordinates. Immutable after construction; all operations are
/// pure and thread-safe.
///
/// Construction validates antisymmetry (by building the full tensor from the
/// upper-triangular entries), the Jacobi identity, and nilpotency (the lower
/// central series must reach {0}); it rejects algebras of step > 4, which the
/// explicit BCH expansion does not cover.
class StructureConstants {
 public:
  StructureConstants(int dim, const std::vector<BracketEntry>& brackets,
                     std::string name = "");

  int dim() const { return n_; }
  int step() const { return step_; }
  const std::string& name() const { return name_; }

  double bracket_coeff(int i, int j, int k) const { return c_[size_t(k)](i, j); }

  /// [a, b] evaluated through the structure constants.
  template <class D1, class D2, class D3>
  void bracket(const Eigen::MatrixBase<D1>& a, const Eigen::MatrixBase<D2>& b,
               Eigen::MatrixBase<D3> const& out_) const {
    auto& out = const_cast<Eigen::MatrixBase<D3>&>(out_).derived();
    out.setZero(n_);
    for (const Nz& e : nnz_) out[e.k] += e.v * (a[e.i] * b[e.j] - a[e.j] * b[e.i]);
  }
  AlgebraElement bracket(const AlgebraElement& a, const AlgebraElement& b) const;

  /// log(exp a . exp b) via the explicit BCH expansion truncated at the
  /// nilpotency step (exact up to roundoff).
  template <class D1, class D2, class D3>
  void bch(const Eigen::MatrixBase<D1>& a, const Eigen::MatrixBase<D2>& b,
           Eigen::MatrixBase<D3> const& out_) const {
    auto& out = const_cast<Eigen::MatrixBase<D3>&>(out_).derived();
    out = a + b;
    if (step_ < 2) return;
    SVec ab(n_);
    bracket(a, b, ab);                 // [a,b]
    out += 0.5 * ab;
    if (step_ < 3) return;
    SVec aab(n_), bab(n_);
    bracket(a, ab, aab);               // [a,[a,b]]
    bracket(b, ab, bab);               // [b,[a,b]]
    out += (aab - bab) / 12.0;
    if (step_ < 4) return;
    SVec baab(n_);
    bracket(b, aab, baab);             // [b,[a,[a,b]]]
    out -= baab / 24.0;
  }
  AlgebraElement bch(const AlgebraElement& a, const AlgebraElement& b) const;

  GroupElement mul(const GroupElement& g1, const GroupElement& g2) const;
  GroupElement inv(const GroupElement& g) const;
  GroupElement identity() const { return GroupElement{Vec::Zero(n_)}; }

  /// Matrix of ad_a on the basis.
  Mat ad(const Vec& a) const;
  /// Ad(exp a) = exp(ad_a), a finite polynomial sum.
  Mat Ad(const GroupElement& g) const;

  /// Ad*(g) l = l o Ad(g^{-1}); a left action on the dual.
  LinearFunctional coadjoint(const GroupElement& g, const LinearFunctional& l) const;

  /// Bases of g = C^1 >= C^2 = [g,g] >= ... >= {0}, as column matrices.
  /// The last entry is the n x 0 zero space.
  const std::vector<Mat>& lower_central_series() const { return lcs_; }

  /// Full flag of ideals g_1 < g_2 < ... < g_n refining the lower central
  /// series, deepest subspace first: column j-1 extends g_{j-1} to g_j.
  /// Quotient bases are extended in input-basis order, so the flag is
  /// deterministic.
  const Mat& refined_flag() const { return flag_; }

  /// Max residual of the Jacobi identity over basis triples.
  double jacobi_residual() const;

  /// Residual of [g, g_j] inside g_{j-1} for a candidate flag; ~0 for a flag
  /// of ideals refining the lower central series (brackets drop strictly).
  double flag_ideal_residual(const Mat& flag) const;

 private:
  struct Nz {
    int i, j, k;
    double v;
  };

  void build_series();

  int n_;
  std::string name_;
  std::vector<Mat> c_;    // c_[k](i,j) = coefficient of e_k in [e_i, e_j]
  std::vector<Nz> nnz_;   // i < j entries only
  int step_ = 0;
  std::vector<Mat> lcs_;
  Mat flag_;
};

/// Orthonormal basis tracker for incremental span computations.
class SpanBasis {
 public:
  explicit SpanBasis(int n) : q_(n, 0) {}
  int rank() const { return int(q_.cols()); }
  /// Adds v to the span if it increases the rank (relative tolerance on the
  /// residual norm). Returns true if added.
  bool try_add(const Vec& v, double tol = 1e-10);
  /// Norm of the component of v orthogonal to the current span.
  double residual(const Vec& v) const;
  const Mat& basis() const { return q_; }

 private:
  Mat q_;
};

/// Reduced column echelon basis of the column span of m. With
/// bottom_up = false pivot rows are found scanning rows top-down (pivots at
/// the earliest input rows); with bottom_up = true scanning is bottom-up, so
/// each basis vector's pivot is its last nonzero row. Columns are returned
/// sorted by pivot row ascending; pivot rows are reported when requested.
/// Deterministic; used for series bases, flags, and subalgebra adaptation.
Mat echelon_basis(const Mat& m, double tol = 1e-10, std::vector<int>* pivot_rows = nullptr,
                  bool bottom_up = false);

}  // namespace nilfourier
