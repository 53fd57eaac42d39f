#include "nilfourier/poly_bound.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace nilfourier {

Vec polynomial_map_bound(const std::function<void(const Vec&, Vec&)>& f,
                         const std::vector<Interval>& box, int deg, int out_dim) {
  const int d = int(box.size());
  const int nn = deg + 1;  // nodes per axis
  if (d == 0) {
    Vec v(out_dim), p(0);
    f(p, v);
    return v.cwiseAbs();
  }
  std::int64_t total = 1;
  for (int a = 0; a < d; ++a) total *= nn;
  if (total > (std::int64_t(1) << 22))
    throw InputError("polynomial_map_bound: node lattice too large");

  // scaled nodes in [-1, 1]
  Vec nodes(nn);
  for (int i = 0; i < nn; ++i) nodes[i] = (nn == 1) ? 0.0 : -1.0 + 2.0 * double(i) / double(deg);

  // inverse Vandermonde: values at nodes -> monomial coefficients
  Mat vand(nn, nn);
  for (int i = 0; i < nn; ++i) {
    double pw = 1.0;
    for (int j = 0; j < nn; ++j) {
      vand(i, j) = pw;
      pw *= nodes[i];
    }
  }
  Mat vinv = vand.inverse();

  // evaluate f on the tensor lattice (C order, last axis fastest)
  Mat values(total, out_dim);
  {
    std::vector<int> idx(size_t(d), 0);
    Vec p(d), out(out_dim);
    for (std::int64_t flat = 0; flat < total; ++flat) {
      for (int a = 0; a < d; ++a) {
        const Interval& iv = box[size_t(a)];
        double mid = 0.5 * (iv.lo + iv.hi), half = 0.5 * (iv.hi - iv.lo);
        p[a] = mid + half * nodes[idx[size_t(a)]];
      }
      f(p, out);
      values.row(flat) = out.transpose();
      for (int a = d - 1; a >= 0; --a) {
        if (++idx[size_t(a)] < nn) break;
        idx[size_t(a)] = 0;
      }
    }
  }

  // transform to monomial coefficients axis by axis
  for (int a = d - 1; a >= 0; --a) {
    std::int64_t stride = 1;
    for (int b = a + 1; b < d; ++b) stride *= nn;
    std::int64_t outer = total / (stride * nn);
    Vec slice(nn), coef(nn);
    for (int o = 0; o < out_dim; ++o) {
      for (std::int64_t u = 0; u < outer; ++u) {
        for (std::int64_t s = 0; s < stride; ++s) {
          std::int64_t base = u * stride * nn + s;
          for (int i = 0; i < nn; ++i) slice[i] = values(base + i * stride, o);
          coef.noalias() = vinv * slice;
          for (int i = 0; i < nn; ++i) values(base + i * stride, o) = coef[i];
        }
      }
    }
  }

  Vec bound = Vec::Zero(out_dim);
  for (std::int64_t r = 0; r < total; ++r)
    for (int o = 0; o < out_dim; ++o) bound[o] += std::abs(values(r, o));
  return bound;
}

}  // namespace nilfourier
