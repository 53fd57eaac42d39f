#pragma once

#include <functional>

#include "nilfourier/grid.hpp"
#include "nilfourier/phi.hpp"

namespace nilfourier {

/// Rigorous sup-norm bound (up to roundoff) for each output of a polynomial
/// map over a box. The map must have per-axis degree <= deg; it is recovered
/// exactly by tensor interpolation on (deg+1)^d nodes in scaled coordinates,
/// and each output is bounded by the sum of absolute monomial coefficients
/// (monomials are bounded by 1 on [-1,1]^d).
///
/// The group law in exponential or Malcev coordinates is weight-graded, so
/// coordinates of iterated products are polynomials of total degree at most
/// the nilpotency step; deg = step is always sufficient for them.
Vec polynomial_map_bound(const std::function<void(const Vec&, Vec&)>& f,
                         const std::vector<Interval>& box, int deg, int out_dim);

}  // namespace nilfourier
