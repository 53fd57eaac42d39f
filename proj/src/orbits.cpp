#include "nilfourier/orbits.hpp"

#include <Eigen/SVD>
#include <cmath>

namespace nilfourier {

Mat skew_form(const StructureConstants& sc, const LinearFunctional& l) {
  const int n = sc.dim();
  if (l.covector.size() != n) throw InputError("skew_form: functional dimension mismatch");
  Mat b = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double v = 0.0;
      for (int k = 0; k < n; ++k) v += l.covector[k] * sc.bracket_coeff(i, j, k);
      b(i, j) = v;
      b(j, i) = -v;
    }
  return b;
}

int skew_rank(const Mat& b, double rel_tol) {
  if (b.rows() == 0) return 0;
  Eigen::JacobiSVD<Mat> svd(b);
  double top = svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
  if (top == 0.0) return 0;
  int r = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()[i] > rel_tol * top) ++r;
  return r;
}

Mat skew_radical(const Mat& b, const Mat& sub, double rel_tol) {
  const int d = int(sub.cols());
  if (d == 0) return Mat(b.rows(), 0);
  Mat br = sub.transpose() * b * sub;  // form restricted to the subspace
  Eigen::JacobiSVD<Mat> svd(br, Eigen::ComputeFullV);
  double top = svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
  int rank = 0;
  if (top > 0.0)
    for (int i = 0; i < svd.singularValues().size(); ++i)
      if (svd.singularValues()[i] > rel_tol * top) ++rank;
  // null space of the restricted form, mapped back to the ambient space
  Mat kernel = svd.matrixV().rightCols(d - rank);
  return sub * kernel;
}

namespace {

double pfaffian_rec(const Mat& b, std::vector<int>& live) {
  const size_t m = live.size();
  if (m == 0) return 1.0;
  if (m % 2 == 1) return 0.0;
  if (m == 2) return b(live[0], live[1]);
  int first = live[0];
  double acc = 0.0;
  double sign = 1.0;
  for (size_t j = 1; j < m; ++j) {
    double bij = b(first, live[j]);
    if (bij != 0.0) {
      std::vector<int> rest;
      rest.reserve(m - 2);
      for (size_t t = 1; t < m; ++t)
        if (t != j) rest.push_back(live[t]);
      acc += sign * bij * pfaffian_rec(b, rest);
    }
    sign = -sign;
  }
  return acc;
}

}  // namespace

double pfaffian(const Mat& b) {
  if (b.rows() != b.cols()) throw InputError("pfaffian: matrix must be square");
  const int n = int(b.rows());
  double scale = n ? b.cwiseAbs().maxCoeff() : 0.0;
  double skew_res = n ? (b + b.transpose()).cwiseAbs().maxCoeff() : 0.0;
  if (skew_res > 1e-12 * std::max(1.0, scale))
    throw InputError("pfaffian: matrix is not skew-symmetric (residual " +
                     std::to_string(skew_res) + ")");
  if (n % 2 == 1) return 0.0;
  std::vector<int> live(size_t(n), 0);
  for (int i = 0; i < n; ++i) live[size_t(i)] = i;
  return pfaffian_rec(b, live);
}

double Polarization::invariant_residual(const StructureConstants& sc) const {
  const int n = sc.dim();
  const int m = dim_h();
  double worst = 0.0;
  SpanBasis span(n);
  for (int c = 0; c < m; ++c) span.try_add(h_basis.col(c));
  Vec br(n);
  for (int a = 0; a < m; ++a)
    for (int b = a + 1; b < m; ++b) {
      sc.bracket(h_basis.col(a), h_basis.col(b), br);
      double nb = br.norm();
      if (nb > 0.0) worst = std::max(worst, span.residual(br));  // subalgebra closure
      worst = std::max(worst, std::abs(l.pair(br)));             // subordinate to l
    }
  Mat b = skew_form(sc, l);
  int expected = n - skew_rank(b) / 2;
  if (m != expected) worst = std::max(worst, 1.0);               // dimension law
  return worst;
}

Polarization vergne_polarization(const StructureConstants& sc, const LinearFunctional& l,
                                 const Mat& flag) {
  const int n = sc.dim();
  if (flag.rows() != n || flag.cols() != n)
    throw InputError("vergne_polarization: flag must be an n x n basis matrix");
  {
    double res = sc.flag_ideal_residual(flag);
    if (res > 1e-10)
      throw InternalError("flag is not an ideal flag (bracket residual " +
                          std::to_string(res) + ")");
  }
  Mat b = skew_form(sc, l);
  SpanBasis hspan(n);
  for (int j = 1; j <= n; ++j) {
    Mat rad = skew_radical(b, flag.leftCols(j));
    for (int c = 0; c < rad.cols(); ++c) hspan.try_add(rad.col(c));
  }
  const int m = hspan.rank();

  // Flag-adapted h basis: express h in flag coordinates and echelonize
  // bottom-up, so each u_t has unit coefficient at its last nonzero flag
  // position (the position where dim(h ^ g_j) jumps) and zeros at the other
  // jump positions. This triangular shape is what makes the factorization a
  // back-substitution.
  Mat flag_inv = flag.inverse();
  std::vector<int> h_idx;
  Mat h_in_flag = echelon_basis(flag_inv * hspan.basis(), 1e-10, &h_idx, /*bottom_up=*/true);
  if (h_in_flag.cols() != m) throw InternalError("polarization basis collapsed");
  Mat h_basis = flag * h_in_flag;

  std::vector<int> comp_idx;
  {
    std::vector<bool> is_jump(size_t(n), false);
    for (int j : h_idx) is_jump[size_t(j)] = true;
    for (int j = 0; j < n; ++j)
      if (!is_jump[size_t(j)]) comp_idx.push_back(j);
  }

  Mat complement(n, n - m);
  for (size_t t = 0; t < comp_idx.size(); ++t) complement.col(long(t)) = flag.col(comp_idx[t]);

  Polarization pol{h_basis, complement, l, flag, h_idx, comp_idx};
  double res = pol.invariant_residual(sc);
  if (res > 1e-8)
    throw InternalError("vergne polarization violates its invariants (residual " +
                        std::to_string(res) + ")");
  return pol;
}

DensityValue plancherel_density(const StructureConstants& sc, const DualChart& chart,
                                const Vec& lambda) {
  Mat b = skew_form(sc, chart.at(lambda));
  const int n = sc.dim();
  DensityValue out;
  int radical_dim = n - skew_rank(b);
  out.non_generic = (radical_dim != chart.k);
  const auto& idx = chart.pfaff_complement;
  Mat sub(idx.size(), idx.size());
  for (size_t a = 0; a < idx.size(); ++a)
    for (size_t c = 0; c < idx.size(); ++c) sub(long(a), long(c)) = b(idx[a], idx[c]);
  out.r = out.non_generic ? 0.0 : std::abs(pfaffian(sub));
  return out;
}

std::vector<int> choose_pfaff_complement(const StructureConstants& sc, const DualChart& chart) {
  const int n = sc.dim();
  Mat b = skew_form(sc, chart.at(chart.reference_lambda));
  Mat rad = skew_radical(b, Mat::Identity(n, n));
  SpanBasis span(n);
  for (int c = 0; c < rad.cols(); ++c) span.try_add(rad.col(c));
  std::vector<int> idx;
  for (int j = 0; j < n && span.rank() < n; ++j)
    if (span.try_add(Vec::Unit(n, j))) idx.push_back(j);
  if (span.rank() != n)
    throw InternalError("chart complement selection failed at the reference point");
  return idx;
}

}  // namespace nilfourier
