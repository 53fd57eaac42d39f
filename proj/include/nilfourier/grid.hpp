#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <vector>

#include "nilfourier/errors.hpp"

namespace nilfourier {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using Complex = std::complex<double>;

/// One uniform grid axis: `points` samples centered at `center`, covering
/// [center - half_width, center + half_width]. Point counts are odd so the
/// center is always a sample.
struct Axis {
  double center = 0.0;
  double half_width = 1.0;
  int points = 3;

  double spacing() const { return 2.0 * half_width / double(points - 1); }
  double lo() const { return center - half_width; }
  double hi() const { return center + half_width; }
  double coord(int i) const { return lo() + spacing() * double(i); }
};

/// Uniform tensor grid over several axes. A grid with zero axes is a single
/// point with quadrature weight 1 (used when the homogeneous space collapses
/// to a point).
class GridSpec {
 public:
  GridSpec() = default;
  explicit GridSpec(std::vector<Axis> axes);

  int dim() const { return int(axes_.size()); }
  std::int64_t size() const { return size_; }
  const Axis& axis(int d) const { return axes_[size_t(d)]; }
  const std::vector<Axis>& axes() const { return axes_; }

  /// Flat index <-> multi-index, C order (last axis fastest).
  std::int64_t flatten(const std::vector<int>& idx) const;
  void unflatten(std::int64_t flat, std::vector<int>& idx) const;

  Vec point(std::int64_t flat) const;
  void point(const std::vector<int>& idx, Vec& out) const;

  /// Trapezoid quadrature weight of a grid node (product over axes of
  /// spacing, halved on the outermost layer of each axis).
  double weight(std::int64_t flat) const;
  double weight(const std::vector<int>& idx) const;

  /// True if the multi-index touches the outermost layer of any axis.
  bool on_boundary(const std::vector<int>& idx) const;

  bool contains(const Vec& p) const;

  /// Total quadrature mass, product of 2*half_width per axis.
  double box_volume() const;

  bool operator==(const GridSpec& o) const;

 private:
  std::vector<Axis> axes_;
  std::int64_t size_ = 1;
  std::vector<std::int64_t> strides_;
};

/// Stateful multi-index iterator avoiding per-node div/mod.
class GridIter {
 public:
  explicit GridIter(const GridSpec& g)
      : grid_(&g), idx_(size_t(g.dim()), 0), flat_(0) {}
  bool done() const { return flat_ >= grid_->size(); }
  void next();
  std::int64_t flat() const { return flat_; }
  const std::vector<int>& idx() const { return idx_; }

 private:
  const GridSpec* grid_;
  std::vector<int> idx_;
  std::int64_t flat_;
};

/// Separable cubic B-spline interpolation on a uniform grid (4-point kernel,
/// C2 smooth) with zero extension outside the sampled box. The sample array
/// is first converted to spline coefficients (spline_prefilter, a tridiagonal
/// solve per axis with zero-extension boundary conditions); evaluation then
/// gathers 4 kernel taps per axis. The spline passes through every sample.
/// Evaluation points outside the grid hull return 0 and are counted in
/// `out_of_box` when a counter is supplied.
CVec spline_prefilter(const GridSpec& grid, const CVec& values);
Vec spline_prefilter(const GridSpec& grid, const Vec& values);

Complex interp_cubic(const GridSpec& grid, const CVec& coeffs, Eigen::Ref<const Vec> p,
                     std::int64_t* out_of_box = nullptr);
double interp_cubic(const GridSpec& grid, const Vec& coeffs, Eigen::Ref<const Vec> p,
                    std::int64_t* out_of_box = nullptr);

/// Prefilter + evaluate in one call (convenience for one-off reads).
Complex interp_cubic_values(const GridSpec& grid, const CVec& values, Eigen::Ref<const Vec> p,
                            std::int64_t* out_of_box = nullptr);

/// B-spline kernel stencil of a point, on coefficient slots: flat column
/// indices and weights (taps falling outside the grid are dropped; they read
/// zero coefficients).
struct Stencil {
  int count = 0;
  std::int64_t cols[256];
  double w[256];
};

/// Builds the scatter/gather stencil at p. Returns false (empty stencil) when
/// p lies outside the grid hull.
bool interp_stencil(const GridSpec& grid, Eigen::Ref<const Vec> p, Stencil& out);

/// In-place solve of rows against the prefilter: replaces each row r of mat
/// (a function on `grid` flattened in C order) by B^{-1} r, where B is the
/// spline collocation operator. A scatter matrix S built from interp_stencil
/// becomes the sampled-function operator S B^{-1} this way.
void unfilter_rows(const GridSpec& grid, CMat& mat);

}  // namespace nilfourier
