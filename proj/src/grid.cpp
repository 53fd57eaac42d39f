#include "nilfourier/grid.hpp"

#include <cmath>

namespace nilfourier {

GridSpec::GridSpec(std::vector<Axis> axes) : axes_(std::move(axes)) {
  size_ = 1;
  strides_.assign(axes_.size(), 1);
  for (const Axis& a : axes_) {
    if (a.points < 3 || a.points % 2 == 0)
      throw InputError("grid axis needs an odd point count >= 3, got " +
                       std::to_string(a.points));
    if (!(a.half_width > 0.0)) throw InputError("grid axis half_width must be positive");
  }
  for (int d = dim() - 1; d >= 0; --d) {
    strides_[size_t(d)] = size_;
    size_ *= axes_[size_t(d)].points;
  }
}

std::int64_t GridSpec::flatten(const std::vector<int>& idx) const {
  std::int64_t f = 0;
  for (int d = 0; d < dim(); ++d) f += strides_[size_t(d)] * idx[size_t(d)];
  return f;
}

void GridSpec::unflatten(std::int64_t flat, std::vector<int>& idx) const {
  idx.resize(size_t(dim()));
  for (int d = 0; d < dim(); ++d) {
    idx[size_t(d)] = int(flat / strides_[size_t(d)]);
    flat %= strides_[size_t(d)];
  }
}

Vec GridSpec::point(std::int64_t flat) const {
  Vec p(dim());
  for (int d = 0; d < dim(); ++d) {
    std::int64_t i = flat / strides_[size_t(d)];
    flat %= strides_[size_t(d)];
    p[d] = axes_[size_t(d)].coord(int(i));
  }
  return p;
}

void GridSpec::point(const std::vector<int>& idx, Vec& out) const {
  out.resize(dim());
  for (int d = 0; d < dim(); ++d) out[d] = axes_[size_t(d)].coord(idx[size_t(d)]);
}

double GridSpec::weight(const std::vector<int>& idx) const {
  double w = 1.0;
  for (int d = 0; d < dim(); ++d) {
    const Axis& a = axes_[size_t(d)];
    double wd = a.spacing();
    if (idx[size_t(d)] == 0 || idx[size_t(d)] == a.points - 1) wd *= 0.5;
    w *= wd;
  }
  return w;
}

double GridSpec::weight(std::int64_t flat) const {
  double w = 1.0;
  for (int d = 0; d < dim(); ++d) {
    std::int64_t i = flat / strides_[size_t(d)];
    flat %= strides_[size_t(d)];
    const Axis& a = axes_[size_t(d)];
    double wd = a.spacing();
    if (i == 0 || i == a.points - 1) wd *= 0.5;
    w *= wd;
  }
  return w;
}

bool GridSpec::on_boundary(const std::vector<int>& idx) const {
  for (int d = 0; d < dim(); ++d)
    if (idx[size_t(d)] == 0 || idx[size_t(d)] == axes_[size_t(d)].points - 1) return true;
  return false;
}

bool GridSpec::contains(const Vec& p) const {
  for (int d = 0; d < dim(); ++d) {
    const Axis& a = axes_[size_t(d)];
    if (p[d] < a.lo() || p[d] > a.hi()) return false;
  }
  return true;
}

double GridSpec::box_volume() const {
  double v = 1.0;
  for (const Axis& a : axes_) v *= 2.0 * a.half_width;
  return v;
}

bool GridSpec::operator==(const GridSpec& o) const {
  if (dim() != o.dim()) return false;
  for (int d = 0; d < dim(); ++d) {
    const Axis &a = axes_[size_t(d)], &b = o.axes_[size_t(d)];
    if (a.center != b.center || a.half_width != b.half_width || a.points != b.points)
      return false;
  }
  return true;
}

void GridIter::next() {
  ++flat_;
  for (int d = grid_->dim() - 1; d >= 0; --d) {
    if (++idx_[size_t(d)] < grid_->axis(d).points) return;
    idx_[size_t(d)] = 0;
  }
}

namespace {

// uniform cubic B-spline kernel on nodes {-1,0,1,2} at local t in [0,1]
inline void cubic_weights(double t, double w[4]) {
  double t2 = t * t, t3 = t2 * t;
  w[0] = (1.0 - 3.0 * t + 3.0 * t2 - t3) / 6.0;
  w[1] = (4.0 - 6.0 * t2 + 3.0 * t3) / 6.0;
  w[2] = (1.0 + 3.0 * t + 3.0 * t2 - 3.0 * t3) / 6.0;
  w[3] = t3 / 6.0;
}

// Thomas solve of the spline collocation system (1/6)[1 4 1] c = f along one
// axis of a flattened array, zero coefficients assumed outside the grid.
template <class Scalar>
void prefilter_axis(Scalar* data, std::int64_t n, std::int64_t stride, std::int64_t count,
                    std::int64_t block) {
  if (n == 1) return;
  std::vector<double> diag(size_t(n));
  for (std::int64_t outer = 0; outer < count; ++outer) {
    for (std::int64_t inner = 0; inner < block; ++inner) {
      Scalar* line = data + outer * stride * n + inner;
      // forward elimination
      diag[0] = 4.0 / 6.0;
      for (std::int64_t i = 1; i < n; ++i) {
        double m = (1.0 / 6.0) / diag[size_t(i - 1)];
        diag[size_t(i)] = 4.0 / 6.0 - m * (1.0 / 6.0);
        line[i * stride] -= m * line[(i - 1) * stride];
      }
      line[(n - 1) * stride] /= diag[size_t(n - 1)];
      for (std::int64_t i = n - 2; i >= 0; --i)
        line[i * stride] =
            (line[i * stride] - (1.0 / 6.0) * line[(i + 1) * stride]) / diag[size_t(i)];
    }
  }
}

template <class VecT>
VecT prefilter_impl(const GridSpec& grid, const VecT& values) {
  VecT c = values;
  const int nd = grid.dim();
  std::int64_t stride = 1;
  for (int d = nd - 1; d >= 0; --d) {
    std::int64_t n = grid.axis(d).points;
    std::int64_t count = grid.size() / (stride * n);
    prefilter_axis(c.data(), n, stride, count, stride);
    stride *= n;
  }
  return c;
}

struct AxisStencil {
  int base;       // grid index of node "-1"
  double w[4];
};

inline bool axis_stencil(const Axis& a, double x, AxisStencil& s) {
  double u = (x - a.lo()) / a.spacing();
  if (u < 0.0 || u > double(a.points - 1)) return false;
  int j = int(std::floor(u));
  if (j >= a.points - 1) j = a.points - 2;  // right edge hits the last cell
  double t = u - double(j);
  s.base = j - 1;
  cubic_weights(t, s.w);
  return true;
}

}  // namespace

Complex interp_cubic(const GridSpec& grid, const CVec& values, Eigen::Ref<const Vec> p,
                     std::int64_t* out_of_box) {
  const int nd = grid.dim();
  if (nd == 0) return values[0];
  AxisStencil st[8];
  for (int d = 0; d < nd; ++d) {
    if (!axis_stencil(grid.axis(d), p[d], st[d])) {
      if (out_of_box) ++*out_of_box;
      return Complex(0.0, 0.0);
    }
  }
  // Tensor gather; taps outside the grid read zero.
  Complex acc(0.0, 0.0);
  int taps = 1;
  for (int d = 0; d < nd; ++d) taps *= 4;
  for (int ti = 0; ti < taps; ++ti) {
    int rest = ti;
    int ks[8];
    for (int d = nd - 1; d >= 0; --d) {
      ks[d] = rest & 3;
      rest >>= 2;
    }
    double w = 1.0;
    std::int64_t flat = 0;
    bool inside = true;
    for (int d = 0; d < nd; ++d) {
      int gi = st[d].base + ks[d];
      if (gi < 0 || gi >= grid.axis(d).points) {
        inside = false;
        break;
      }
      w *= st[d].w[ks[d]];
      flat = flat * grid.axis(d).points + gi;
    }
    if (!inside) continue;
    acc += w * values[flat];
  }
  return acc;
}

double interp_cubic(const GridSpec& grid, const Vec& values, Eigen::Ref<const Vec> p,
                    std::int64_t* out_of_box) {
  const int nd = grid.dim();
  if (nd == 0) return values[0];
  AxisStencil st[8];
  for (int d = 0; d < nd; ++d) {
    if (!axis_stencil(grid.axis(d), p[d], st[d])) {
      if (out_of_box) ++*out_of_box;
      return 0.0;
    }
  }
  double acc = 0.0;
  int taps = 1;
  for (int d = 0; d < nd; ++d) taps *= 4;
  for (int ti = 0; ti < taps; ++ti) {
    int rest = ti;
    int ks[8];
    for (int d = nd - 1; d >= 0; --d) {
      ks[d] = rest & 3;
      rest >>= 2;
    }
    double w = 1.0;
    std::int64_t flat = 0;
    bool inside = true;
    for (int d = 0; d < nd; ++d) {
      int gi = st[d].base + ks[d];
      if (gi < 0 || gi >= grid.axis(d).points) {
        inside = false;
        break;
      }
      w *= st[d].w[ks[d]];
      flat = flat * grid.axis(d).points + gi;
    }
    if (!inside) continue;
    acc += w * values[flat];
  }
  return acc;
}

CVec spline_prefilter(const GridSpec& grid, const CVec& values) {
  if (values.size() != grid.size()) throw InputError("spline_prefilter: size mismatch");
  return prefilter_impl(grid, values);
}

Vec spline_prefilter(const GridSpec& grid, const Vec& values) {
  if (values.size() != grid.size()) throw InputError("spline_prefilter: size mismatch");
  return prefilter_impl(grid, values);
}

Complex interp_cubic_values(const GridSpec& grid, const CVec& values, Eigen::Ref<const Vec> p,
                            std::int64_t* out_of_box) {
  return interp_cubic(grid, spline_prefilter(grid, values), p, out_of_box);
}

void unfilter_rows(const GridSpec& grid, CMat& mat) {
  if (mat.cols() != grid.size()) throw InputError("unfilter_rows: column count mismatch");
  if (grid.dim() == 0) return;
  // rows are functions on the grid; solve each against the collocation
  // operator, axis by axis (work on the transposed copy so lines are
  // contiguous)
  CMat t = mat.transpose();
  std::int64_t stride = 1;
  for (int d = grid.dim() - 1; d >= 0; --d) {
    std::int64_t n = grid.axis(d).points;
    std::int64_t count = grid.size() / (stride * n);
    for (std::int64_t r = 0; r < t.cols(); ++r)
      prefilter_axis(t.col(r).data(), n, stride, count, stride);
    stride *= n;
  }
  mat = t.transpose();
}

bool interp_stencil(const GridSpec& grid, Eigen::Ref<const Vec> p, Stencil& out) {
  const int nd = grid.dim();
  out.count = 0;
  if (nd == 0) {
    out.cols[0] = 0;
    out.w[0] = 1.0;
    out.count = 1;
    return true;
  }
  AxisStencil st[4];
  if (nd > 4) throw InternalError("interp_stencil supports at most 4 axes");
  for (int d = 0; d < nd; ++d)
    if (!axis_stencil(grid.axis(d), p[d], st[d])) return false;
  int taps = 1;
  for (int d = 0; d < nd; ++d) taps *= 4;
  for (int ti = 0; ti < taps; ++ti) {
    int rest = ti;
    int ks[4];
    for (int d = nd - 1; d >= 0; --d) {
      ks[d] = rest & 3;
      rest >>= 2;
    }
    double w = 1.0;
    std::int64_t flat = 0;
    bool inside = true;
    for (int d = 0; d < nd; ++d) {
      int gi = st[d].base + ks[d];
      if (gi < 0 || gi >= grid.axis(d).points) {
        inside = false;
        break;
      }
      w *= st[d].w[ks[d]];
      flat = flat * grid.axis(d).points + gi;
    }
    if (!inside || w == 0.0) continue;
    out.cols[out.count] = flat;
    out.w[out.count] = w;
    ++out.count;
  }
  return true;
}

}  // namespace nilfourier
