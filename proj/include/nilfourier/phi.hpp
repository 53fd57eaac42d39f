#pragma once

#include <cstdint>
#include <string>

#include "nilfourier/grid.hpp"

namespace nilfourier {

/// Closed interval; used for declared compact supports.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// A bounded function with compact support, sampled on a uniform grid over
/// the group in polarization-adapted Malcev coordinates (H axes first, then
/// X axes). Values must vanish on the outermost grid layer and the declared
/// support box must lie strictly inside the grid box.
struct SampledGroupFunction {
  GridSpec grid;
  CVec values;
  std::vector<Interval> support;

  void validate() const;
  double max_abs() const;
  /// Sum of w |phi|^2 over the grid (the squared L2 norm; Haar measure is
  /// Lebesgue in these coordinates).
  double l2_norm_sq() const;
};

/// Counter-based RNG: every drawn number is a pure function of
/// (seed, stream, index), so parallel workers never share generator state.
std::uint64_t rng_word(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);
double rng_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t index,
                   double lo = 0.0, double hi = 1.0);

/// C-infinity bump profile: exp(-r^2 / (1 - r^2)) for |r| < 1, else 0.
double bump_profile(double r);

/// Built-in test function families. Widths and centers are relative to the
/// per-axis half width of the grid.
struct PhiSpec {
  std::string family = "random";  // zero | bump | gaussian | random
  std::uint64_t seed = 1;
  int bumps = 3;                  // random family: number of superposed bumps
  double width_lo = 0.30;         // random family: relative width range
  double width_hi = 0.55;
  double center_frac = 0.30;      // random family: centers within +-frac of half width
  double width = 0.5;             // bump family: relative width (all axes)
  double sigma = 0.35;            // gaussian family: relative sigma
  double support_frac = 0.90;     // gaussian family: smooth cutoff radius
};

SampledGroupFunction make_phi(const PhiSpec& spec, const GridSpec& grid);

}  // namespace nilfourier
