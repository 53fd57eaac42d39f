#include "nilfourier/phi.hpp"

#include <cmath>

namespace nilfourier {

void SampledGroupFunction::validate() const {
  if (values.size() != grid.size())
    throw InputError("sampled function: value count does not match the grid");
  if (int(support.size()) != grid.dim())
    throw InputError("sampled function: support box dimension mismatch");
  for (int d = 0; d < grid.dim(); ++d) {
    const Axis& a = grid.axis(d);
    const Interval& s = support[size_t(d)];
    if (!(s.lo < s.hi) || s.lo <= a.lo() || s.hi >= a.hi())
      throw InputError("sampled function: support box must lie strictly inside the grid box "
                       "(axis " + std::to_string(d) + ")");
  }
  double scale = max_abs();
  if (scale == 0.0) return;
  std::vector<int> idx;
  for (GridIter it(grid); !it.done(); it.next()) {
    if (!grid.on_boundary(it.idx())) continue;
    if (std::abs(values[it.flat()]) > 1e-12 * scale)
      throw InputError("sampled function: values do not vanish on the grid boundary layer");
  }
}

double SampledGroupFunction::max_abs() const {
  double m = 0.0;
  for (std::int64_t i = 0; i < values.size(); ++i) m = std::max(m, std::abs(values[i]));
  return m;
}

double SampledGroupFunction::l2_norm_sq() const {
  double acc = 0.0;
  for (GridIter it(grid); !it.done(); it.next()) {
    double a = std::abs(values[it.flat()]);
    if (a != 0.0) acc += grid.weight(it.idx()) * a * a;
  }
  return acc;
}

std::uint64_t rng_word(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  auto mix = [](std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  };
  return mix(mix(mix(seed) ^ stream) ^ index);
}

double rng_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t index, double lo,
                   double hi) {
  double u = double(rng_word(seed, stream, index) >> 11) * 0x1.0p-53;
  return lo + u * (hi - lo);
}

double bump_profile(double r) {
  double r2 = r * r;
  if (r2 >= 1.0) return 0.0;
  return std::exp(-r2 / (1.0 - r2));
}

namespace {

struct BumpTerm {
  double amp;
  std::vector<double> center;
  std::vector<double> width;
};

SampledGroupFunction assemble(const GridSpec& grid, const std::vector<BumpTerm>& terms) {
  const int nd = grid.dim();
  SampledGroupFunction phi;
  phi.grid = grid;
  phi.values = CVec::Zero(grid.size());
  phi.support.resize(size_t(nd));
  for (int d = 0; d < nd; ++d) {
    double lo = grid.axis(d).hi(), hi = grid.axis(d).lo();
    for (const BumpTerm& t : terms) {
      lo = std::min(lo, t.center[size_t(d)] - t.width[size_t(d)]);
      hi = std::max(hi, t.center[size_t(d)] + t.width[size_t(d)]);
    }
    phi.support[size_t(d)] = {lo, hi};
  }
  Vec p(nd);
  for (GridIter it(grid); !it.done(); it.next()) {
    grid.point(it.idx(), p);
    double v = 0.0;
    for (const BumpTerm& t : terms) {
      double prod = t.amp;
      for (int d = 0; d < nd && prod != 0.0; ++d)
        prod *= bump_profile((p[d] - t.center[size_t(d)]) / t.width[size_t(d)]);
      v += prod;
    }
    phi.values[it.flat()] = v;
  }
  phi.validate();
  return phi;
}

}  // namespace

SampledGroupFunction make_phi(const PhiSpec& spec, const GridSpec& grid) {
  const int nd = grid.dim();
  if (spec.family == "zero") {
    SampledGroupFunction phi;
    phi.grid = grid;
    phi.values = CVec::Zero(grid.size());
    phi.support.resize(size_t(nd));
    for (int d = 0; d < nd; ++d) {
      const Axis& a = grid.axis(d);
      phi.support[size_t(d)] = {a.center - 0.5 * a.half_width, a.center + 0.5 * a.half_width};
    }
    phi.validate();
    return phi;
  }
  if (spec.family == "bump") {
    BumpTerm t;
    t.amp = 1.0;
    for (int d = 0; d < nd; ++d) {
      t.center.push_back(grid.axis(d).center);
      t.width.push_back(spec.width * grid.axis(d).half_width);
    }
    return assemble(grid, {t});
  }
  if (spec.family == "gaussian") {
    // Gaussian truncated by a smooth cutoff: exp(-sum (c/sigma)^2) times the
    // compactly supported bump profile at the cutoff radius.
    SampledGroupFunction phi;
    phi.grid = grid;
    phi.values = CVec::Zero(grid.size());
    phi.support.resize(size_t(nd));
    for (int d = 0; d < nd; ++d) {
      const Axis& a = grid.axis(d);
      phi.support[size_t(d)] = {a.center - spec.support_frac * a.half_width,
                                a.center + spec.support_frac * a.half_width};
    }
    Vec p(nd);
    for (GridIter it(grid); !it.done(); it.next()) {
      grid.point(it.idx(), p);
      double q = 0.0, cut = 1.0;
      for (int d = 0; d < nd; ++d) {
        const Axis& a = grid.axis(d);
        double c = p[d] - a.center;
        double s = spec.sigma * a.half_width;
        q += (c * c) / (s * s);
        cut *= bump_profile(c / (spec.support_frac * a.half_width));
      }
      phi.values[it.flat()] = std::exp(-q) * cut;
    }
    phi.validate();
    return phi;
  }
  if (spec.family == "random") {
    // Seeded superposition of separable bumps; parameters are pure functions
    // of (seed, bump index, axis), so generation is reproducible and
    // parallelizable.
    std::vector<BumpTerm> terms;
    for (int b = 0; b < spec.bumps; ++b) {
      BumpTerm t;
      t.amp = rng_uniform(spec.seed, 0xA3Full, std::uint64_t(b), 0.5, 1.5);
      for (int d = 0; d < nd; ++d) {
        const Axis& a = grid.axis(d);
        std::uint64_t ix = std::uint64_t(b) * 64 + std::uint64_t(d);
        double c = a.center + a.half_width * spec.center_frac *
                                  rng_uniform(spec.seed, 0xCE17ull, ix, -1.0, 1.0);
        double w = a.half_width * rng_uniform(spec.seed, 0x51D7ull, ix, spec.width_lo, spec.width_hi);
        t.center.push_back(c);
        t.width.push_back(w);
      }
      terms.push_back(std::move(t));
    }
    return assemble(grid, terms);
  }
  throw InputError("unknown test function family '" + spec.family + "'");
}

}  // namespace nilfourier
