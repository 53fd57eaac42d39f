#include "nilfourier/algebra.hpp"

#include <algorithm>
#include <cmath>

namespace nilfourier {

bool SpanBasis::try_add(const Vec& v, double tol) {
  double nv = v.norm();
  if (nv == 0.0) return false;
  Vec r = v;
  if (q_.cols() > 0) r -= q_ * (q_.transpose() * v);
  // re-orthogonalize once; classical Gram-Schmidt loses digits
  if (q_.cols() > 0) r -= q_ * (q_.transpose() * r);
  if (r.norm() <= tol * nv) return false;
  r.normalize();
  Mat q(q_.rows(), q_.cols() + 1);
  q << q_, r;
  q_ = std::move(q);
  return true;
}

double SpanBasis::residual(const Vec& v) const {
  if (q_.cols() == 0) return v.norm();
  Vec r = v - q_ * (q_.transpose() * v);
  return r.norm();
}

Mat echelon_basis(const Mat& m, double tol, std::vector<int>* pivot_rows, bool bottom_up) {
  const int rows = int(m.rows());
  if (pivot_rows) pivot_rows->clear();
  if (m.cols() == 0) return Mat(rows, 0);
  Mat w = m;
  double scale = w.cwiseAbs().maxCoeff();
  if (scale == 0.0) return Mat(rows, 0);
  std::vector<int> pivots;
  int col_cursor = 0;
  for (int step = 0; step < rows && col_cursor < w.cols(); ++step) {
    int r = bottom_up ? rows - 1 - step : step;
    // column (from cursor on) with the largest entry in row r
    int best = -1;
    double best_abs = tol * scale;
    for (int c = col_cursor; c < w.cols(); ++c) {
      if (std::abs(w(r, c)) > best_abs) {
        best_abs = std::abs(w(r, c));
        best = c;
      }
    }
    if (best < 0) continue;
    w.col(col_cursor).swap(w.col(best));
    Vec piv = w.col(col_cursor) / w(r, col_cursor);
    // eliminate row r from the other columns
    for (int c = 0; c < w.cols(); ++c) {
      if (c == col_cursor) continue;
      w.col(c) -= piv * w(r, c);
    }
    w.col(col_cursor) = piv;
    pivots.push_back(r);
    ++col_cursor;
  }
  // order columns by pivot row ascending
  std::vector<int> order(pivots.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = int(i);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return pivots[size_t(a)] < pivots[size_t(b)]; });
  Mat out(rows, col_cursor);
  for (int c = 0; c < col_cursor; ++c) out.col(c) = w.col(order[size_t(c)]);
  if (pivot_rows)
    for (int c = 0; c < col_cursor; ++c) pivot_rows->push_back(pivots[size_t(order[size_t(c)])]);
  return out;
}

StructureConstants::StructureConstants(int dim, const std::vector<BracketEntry>& brackets,
                                       std::string name)
    : n_(dim), name_(std::move(name)) {
  if (dim <= 0) throw InputError("algebra dimension must be positive");
  if (dim > kMaxDim)
    throw InputError("algebra dimension " + std::to_string(dim) +
                     " exceeds the supported maximum of " + std::to_string(kMaxDim));
  c_.assign(size_t(n_), Mat::Zero(n_, n_));
  for (const BracketEntry& b : brackets) {
    if (b.i < 0 || b.j < 0 || b.i >= n_ || b.j >= n_)
      throw InputError("bracket index out of range");
    if (b.i == b.j) throw InputError("bracket [e_i, e_i] must vanish; omit diagonal entries");
    if (b.coeffs.size() != n_)
      throw InputError("bracket coefficient vector has wrong length");
    for (int k = 0; k < n_; ++k) {
      c_[size_t(k)](b.i, b.j) += b.coeffs[k];
      c_[size_t(k)](b.j, b.i) -= b.coeffs[k];
    }
  }
  for (int i = 0; i < n_; ++i)
    for (int j = i + 1; j < n_; ++j)
      for (int k = 0; k < n_; ++k)
        if (c_[size_t(k)](i, j) != 0.0)
          nnz_.push_back({i, j, k, c_[size_t(k)](i, j)});

  double jr = jacobi_residual();
  if (jr > 1e-12)
    throw InputError("structure constants violate the Jacobi identity (residual " +
                     std::to_string(jr) + ")");
  build_series();
}

AlgebraElement StructureConstants::bracket(const AlgebraElement& a,
                                           const AlgebraElement& b) const {
  if (a.coords.size() != n_ || b.coords.size() != n_)
    throw InputError("bracket: element dimension mismatch");
  AlgebraElement r;
  r.coords.resize(n_);
  bracket(a.coords, b.coords, r.coords);
  return r;
}

AlgebraElement StructureConstants::bch(const AlgebraElement& a, const AlgebraElement& b) const {
  if (a.coords.size() != n_ || b.coords.size() != n_)
    throw InputError("bch: element dimension mismatch");
  AlgebraElement r;
  r.coords.resize(n_);
  bch(a.coords, b.coords, r.coords);
  return r;
}

GroupElement StructureConstants::mul(const GroupElement& g1, const GroupElement& g2) const {
  if (g1.coords.size() != n_ || g2.coords.size() != n_)
    throw InputError("mul: element dimension mismatch");
  GroupElement r;
  r.coords.resize(n_);
  bch(g1.coords, g2.coords, r.coords);
  return r;
}

GroupElement StructureConstants::inv(const GroupElement& g) const {
  return GroupElement{-g.coords};
}

Mat StructureConstants::ad(const Vec& a) const {
  Mat m = Mat::Zero(n_, n_);
  for (const Nz& e : nnz_) {
    m(e.k, e.j) += e.v * a[e.i];
    m(e.k, e.i) -= e.v * a[e.j];
  }
  return m;
}

Mat StructureConstants::Ad(const GroupElement& g) const {
  Mat adm = ad(g.coords);
  Mat result = Mat::Identity(n_, n_);
  Mat term = Mat::Identity(n_, n_);
  for (int j = 1; j <= step_; ++j) {
    term = (adm * term) / double(j);
    if (term.cwiseAbs().maxCoeff() == 0.0) break;
    result += term;
  }
  return result;
}

LinearFunctional StructureConstants::coadjoint(const GroupElement& g,
                                               const LinearFunctional& l) const {
  if (l.covector.size() != n_) throw InputError("coadjoint: functional dimension mismatch");
  Mat a = Ad(inv(g));
  return LinearFunctional{a.transpose() * l.covector};
}

double StructureConstants::jacobi_residual() const {
  double worst = 0.0;
  Vec t1(n_), t2(n_), t3(n_), u(n_);
  for (int i = 0; i < n_; ++i)
    for (int j = i + 1; j < n_; ++j)
      for (int k = j + 1; k < n_; ++k) {
        Vec ei = Vec::Unit(n_, i), ej = Vec::Unit(n_, j), ek = Vec::Unit(n_, k);
        bracket(ei, ej, u);
        bracket(u, ek, t1);
        bracket(ej, ek, u);
        bracket(u, ei, t2);
        bracket(ek, ei, u);
        bracket(u, ej, t3);
        worst = std::max(worst, (t1 + t2 + t3).cwiseAbs().maxCoeff());
      }
  return worst;
}

void StructureConstants::build_series() {
  lcs_.clear();
  lcs_.push_back(Mat::Identity(n_, n_));
  Vec br(n_);
  while (true) {
    const Mat& prev = lcs_.back();
    if (prev.cols() == 0) break;
    // span of [g, prev]
    Mat cand(n_, n_ * prev.cols());
    int cc = 0;
    for (int i = 0; i < n_; ++i) {
      Vec ei = Vec::Unit(n_, i);
      for (int c = 0; c < prev.cols(); ++c) {
        bracket(ei, prev.col(c), br);
        cand.col(cc++) = br;
      }
    }
    Mat next = echelon_basis(cand.leftCols(cc));
    if (next.cols() >= prev.cols())
      throw InputError("algebra '" + name_ + "' is not nilpotent: lower central series "
                       "stalls at dimension " + std::to_string(prev.cols()));
    lcs_.push_back(next);
    if (next.cols() == 0) break;
  }
  step_ = int(lcs_.size()) - 1;
  if (step_ > 4)
    throw InputError("nilpotency step " + std::to_string(step_) +
                     " exceeds the supported maximum of 4");

  // Refine to a full flag: walk the series from the deepest nonzero term up,
  // extending by echelon basis vectors in input order.
  SpanBasis span(n_);
  Mat flag(n_, n_);
  int col = 0;
  for (int layer = int(lcs_.size()) - 1; layer >= 0; --layer) {
    const Mat& ideal = lcs_[size_t(layer)];
    for (int c = 0; c < ideal.cols(); ++c) {
      if (span.try_add(ideal.col(c))) {
        if (col >= n_) throw InternalError("flag refinement overflow");
        flag.col(col++) = ideal.col(c);
      }
    }
  }
  if (col != n_) throw InternalError("flag refinement did not reach full dimension");
  flag_ = flag;

  double res = flag_ideal_residual(flag_);
  if (res > 1e-10)
    throw InternalError("refined flag is not an ideal flag (residual " +
                        std::to_string(res) + ")");
}

double StructureConstants::flag_ideal_residual(const Mat& flag) const {
  if (flag.rows() != n_ || flag.cols() != n_)
    throw InputError("flag must be a square basis matrix");
  double worst = 0.0;
  Vec br(n_);
  for (int j = 0; j < n_; ++j) {
    SpanBasis span(n_);
    for (int c = 0; c < j; ++c) span.try_add(flag.col(c));
    // [e_i, v_j] must lie in g_{j-1}, the span of the first j-1 columns
    for (int i = 0; i < n_; ++i) {
      bracket(Vec(Vec::Unit(n_, i)), flag.col(j), br);
      if (br.norm() == 0.0) continue;
      worst = std::max(worst, span.residual(br) / std::max(1.0, flag.col(j).norm()));
    }
  }
  return worst;
}

}  // namespace nilfourier
