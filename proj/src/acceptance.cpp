#include "nilfourier/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>

#include "nilfourier/catalog.hpp"
#include "nilfourier/fft.hpp"
#include "nilfourier/io.hpp"

namespace nilfourier {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

GridSpec cube(int dims, double hw, int points) {
  std::vector<Axis> axes;
  for (int d = 0; d < dims; ++d) axes.push_back({0.0, hw, points});
  return GridSpec(axes);
}

PhiSpec seeded_random(std::uint64_t seed) {
  PhiSpec s;
  s.family = "random";
  s.seed = seed;
  return s;
}

double rel_hs_err(const OperatorMatrix& ref, const OperatorMatrix& other) {
  OperatorMatrix diff{ref.lambda, ref.mat - other.mat, ref.xgrid};
  return std::sqrt(hs_norm_sq(diff) / hs_norm_sq(ref));
}

// 1. Abelian reduction: the 1x1 transform matrices must match the classical
// Fourier transform computed by a zero-padded FFT, on 33 lattice frequencies
// inside [-10, 10], to 1e-6 relative accuracy.
CriterionResult criterion_abelian_fft(int workers) {
  CriterionResult res{1, "abelian reduction vs FFT oracle", false, "", 0.0};
  GroupBundle ab = get_group("abelian1");
  PhiSpec spec;
  spec.family = "bump";
  spec.width = 0.5;  // supported in [-1, 1] on the [-2, 2] 257-point grid
  SampledGroupFunction phi = make_phi(spec, cube(1, 2.0, 257));

  const int pad = 4096;
  const double dx = phi.grid.axis(0).spacing();
  CVec padded = CVec::Zero(pad);
  for (int i = 0; i < phi.grid.axis(0).points; ++i) padded[i] = phi.values[i];
  CVec spectrum = dft(padded, +1);

  std::vector<Vec> lams;
  std::vector<Complex> oracle;
  for (int c = 0; c < 33; ++c) {
    int j = -96 + 6 * c;  // lattice frequencies 2 pi j / (pad dx) in [-9.5, 9.5]
    double lam = 2.0 * std::numbers::pi * double(j) / (double(pad) * dx);
    lams.push_back(Vec::Constant(1, lam));
    int jj = ((j % pad) + pad) % pad;
    oracle.push_back(dx * std::polar(1.0, lam * phi.grid.axis(0).lo()) * spectrum[jj]);
  }

  auto ops = group_fourier_direct(phi, ab.family, ab.x_grid, LambdaSet::from_points(lams),
                                  workers);
  double max_abs = 0.0;
  for (const Complex& v : oracle) max_abs = std::max(max_abs, std::abs(v));
  double worst = 0.0;
  for (size_t i = 0; i < oracle.size(); ++i)
    worst = std::max(worst, std::abs(ops[i].mat(0, 0) - oracle[i]) / max_abs);
  res.pass = worst < 1e-6;
  res.detail = "max relative error " + fmt(worst) + " (tolerance 1e-6, 33 lattice frequencies)";
  return res;
}

// 2. Route equivalence: direct operator assembly vs the kernel-integral
// route on the reference grids, 5 seeded bumps, relative HS error < 5e-3;
// halving the spacing must reduce the error by 4 +- 30%.
CriterionResult criterion_route(int workers) {
  CriterionResult res{2, "route equivalence with order-2 refinement", false, "", 0.0};
  GroupBundle h = get_group("heisenberg");
  LambdaSet lams = LambdaSet::from_points([] {
    std::vector<Vec> v;
    for (int i = 0; i < 8; ++i) v.push_back(Vec::Constant(1, 0.5 + 3.5 * double(i) / 7.0));
    return v;
  }());

  double worst_fine = 0.0, worst_ratio_lo = 1e30, worst_ratio_hi = 0.0;
  double ratio_sum = 0.0;
  for (int b = 0; b < 5; ++b) {
    PhiSpec spec = seeded_random(1000 + std::uint64_t(b));
    auto run = [&](int gp, int xp) {
      SampledGroupFunction phi = make_phi(spec, cube(3, 2.0, gp));
      GridSpec xg({{0.0, 3.0, xp}});
      auto direct = group_fourier_direct(phi, h.family, xg, lams, workers);
      KernelTensor kt = kernel_tensor(phi, h.family, lams, xg, workers);
      double worst = 0.0;
      for (std::int64_t l = 0; l < lams.size(); ++l)
        worst = std::max(worst, rel_hs_err(direct[size_t(l)], operator_from_kernel(kt, l)));
      return worst;
    };
    double coarse = run(17, 33);
    double fine = run(33, 65);
    worst_fine = std::max(worst_fine, fine);
    double ratio = coarse / fine;
    ratio_sum += ratio;
    worst_ratio_lo = std::min(worst_ratio_lo, ratio);
    worst_ratio_hi = std::max(worst_ratio_hi, ratio);
  }
  double mean_ratio = ratio_sum / 5.0;
  bool ratio_ok = mean_ratio >= 4.0 * 0.7 && mean_ratio <= 4.0 * 1.3;
  res.pass = worst_fine < 5e-3 && ratio_ok;
  res.detail = "max rel error " + fmt(worst_fine) + " (tol 5e-3); mean refinement ratio " +
               fmt(mean_ratio) + " (per-bump " + fmt(worst_ratio_lo) + ".." +
               fmt(worst_ratio_hi) + "; target 4 +- 30%)";
  return res;
}

// 3. Representation laws on the reference X-grid: isometry and the
// multiplicative law of act, on resolved (smooth, interior) functions, for
// 50 seeded small-displacement pairs.
CriterionResult criterion_rep_laws(int) {
  CriterionResult res{3, "unitarity and homomorphism of the action", false, "", 0.0};
  GroupBundle h = get_group("heisenberg");
  InducedRep rep = h.rep_at(Vec::Ones(1));
  GridSpec xg = h.x_grid;
  const double cell = xg.axis(0).spacing();

  auto bump_f = [&](int t) {
    CVec f(xg.size());
    // widths large enough that the cubic interpolation resolves the bump
    double w = 1.4 + 0.1 * double(t % 4);
    double c = 0.2 * double(t % 3) - 0.2;
    for (std::int64_t i = 0; i < xg.size(); ++i)
      f[i] = bump_profile((xg.point(i)[0] - c) / w);
    return f;
  };
  auto norm_sq = [&](const CVec& f) {
    double acc = 0.0;
    for (std::int64_t i = 0; i < xg.size(); ++i) acc += xg.weight(i) * std::norm(f[i]);
    return acc;
  };

  double worst_unit = 0.0, worst_hom = 0.0;
  for (int t = 0; t < 50; ++t) {
    Vec c1(3), c2(3);
    for (int d = 0; d < 3; ++d) {
      c1[d] = rng_uniform(3001, 1, std::uint64_t(6 * t + d), -8.0 * cell, 8.0 * cell);
      c2[d] = rng_uniform(3001, 2, std::uint64_t(6 * t + d), -8.0 * cell, 8.0 * cell);
    }
    GroupElement g1{c1}, g2{c2};
    CVec f = bump_f(t);
    double nf = norm_sq(f);

    CVec gf = rep.act(g1, xg, f);
    worst_unit = std::max(worst_unit, std::abs(norm_sq(gf) - nf) / nf);

    CVec lhs = rep.act(g1, xg, rep.act(g2, xg, f));
    CVec rhs = rep.act(h.sc->mul(g1, g2), xg, f);
    worst_hom = std::max(worst_hom, std::sqrt(norm_sq(CVec(lhs - rhs)) / nf));
  }
  res.pass = worst_unit < 1e-3 && worst_hom < 1e-3;
  res.detail = "isometry defect " + fmt(worst_unit) + ", homomorphism defect " +
               fmt(worst_hom) + " (tol 1e-3, 50 pairs, displacements <= 8 cells)";
  return res;
}

// 4. Oracle agreement: act vs the closed-form realization, 100 random
// triples (lambda, g, f) on the reference grid; the cubic interpolation
// error bound is reported and must stay below 1e-4.
CriterionResult criterion_oracle(int) {
  CriterionResult res{4, "action matches the closed-form realization", false, "", 0.0};
  GroupBundle h = get_group("heisenberg");
  GridSpec xg = h.x_grid;

  double worst = 0.0, interp_bound = 0.0;
  for (int t = 0; t < 100; ++t) {
    double lam = rng_uniform(4001, 0, std::uint64_t(t), 0.5, 2.0);
    Vec g(3);
    for (int d = 0; d < 3; ++d)
      g[d] = rng_uniform(4001, 1, std::uint64_t(8 * t + d), -0.5, 0.5);
    double w = rng_uniform(4001, 2, std::uint64_t(t), 1.3, 1.7);
    double c = rng_uniform(4001, 3, std::uint64_t(t), -0.3, 0.3);
    CVec f(xg.size());
    for (std::int64_t i = 0; i < xg.size(); ++i)
      f[i] = bump_profile((xg.point(i)[0] - c) / w);

    // 4th finite difference estimates h^4 f'''' for the Lagrange cubic bound
    double d4 = 0.0;
    for (std::int64_t i = 2; i + 2 < xg.size(); ++i)
      d4 = std::max(d4, std::abs(f[i - 2] - 4.0 * f[i - 1] + 6.0 * f[i] - 4.0 * f[i + 1] +
                                 f[i + 2]));
    interp_bound = std::max(interp_bound, (3.0 / 128.0) * d4);

    CVec via_act = h.rep_at(Vec::Constant(1, lam)).act(GroupElement{g}, xg, f);
    CVec via_oracle = apply_oracle(h.oracle(Vec::Constant(1, lam), GroupElement{g}), xg, f);
    for (std::int64_t i = 0; i < xg.size(); ++i)
      worst = std::max(worst, std::abs(via_act[i] - via_oracle[i]));
  }
  res.pass = worst < 1e-4 && interp_bound < 1e-4;
  res.detail = "max pointwise error " + fmt(worst) + ", interpolation bound " +
               fmt(interp_bound) + " (both must be < 1e-4)";
  return res;
}

// 5. Plancherel ratio constancy over 10 seeded bumps on the wide X window;
// the spread must stay under 2% and no tail warning may fire.
CriterionResult criterion_plancherel(int workers) {
  CriterionResult res{5, "Plancherel ratio constancy", false, "", 0.0};
  GroupBundle h = get_group("heisenberg");
  LambdaSet lams = LambdaSet::from_grid(h.lambda_plancherel, *h.sc, h.chart);
  int unmasked = 0;
  for (char m : lams.masked) unmasked += m ? 0 : 1;

  std::vector<double> ratios;
  bool tail = false;
  for (int b = 0; b < 10; ++b) {
    SampledGroupFunction phi = make_phi(seeded_random(5000 + std::uint64_t(b)), h.g_grid);
    PlancherelResult pr = plancherel_check(phi, h.family, lams, h.x_plancherel, workers);
    ratios.push_back(pr.ratio);
    tail = tail || pr.tail_warning;
  }
  double mean = 0.0;
  for (double r : ratios) mean += r;
  mean /= double(ratios.size());
  double var = 0.0;
  for (double r : ratios) var += (r - mean) * (r - mean);
  double rel_spread = std::sqrt(var / double(ratios.size())) / mean;
  res.pass = rel_spread < 0.02 && !tail;
  res.detail = "stdev/mean " + fmt(rel_spread) + " over 10 bumps (tol 2%), mean ratio " +
               fmt(mean) + ", " + std::to_string(unmasked) + " lambda points" +
               (tail ? ", TAIL WARNING" : ", no tail warning");
  return res;
}

// 6. Vanishing-set scan: 20 seeded nonzero bumps per preset must give an
// empty-measure vanishing set at eps = 1e-8 ||K||_max, and the zero function
// must vanish across the whole window.
CriterionResult criterion_pw(int workers) {
  CriterionResult res{6, "vanishing sets of nonzero functions have measure zero", false, "", 0.0};
  std::ostringstream detail;
  bool ok = true;

  struct Setup {
    const char* group;
    GridSpec g;
    GridSpec x;
  };
  std::vector<Setup> setups;
  setups.push_back({"abelian1", cube(1, 2.0, 257), GridSpec{}});
  setups.push_back({"heisenberg", cube(3, 2.0, 33), GridSpec({{0.0, 3.0, 33}})});

  for (const Setup& su : setups) {
    GroupBundle b = get_group(su.group);
    LambdaSet lams = LambdaSet::from_grid(b.lambda_grid, *b.sc, b.chart);
    double worst_measure = 0.0;
    int worst_below = 0;
    for (int t = 0; t < 20; ++t) {
      SampledGroupFunction phi = make_phi(seeded_random(6000 + std::uint64_t(t)), su.g);
      KernelTensor kt = kernel_tensor(phi, b.family, lams, su.x, workers);
      VanishingReport rep = pw_scan(kt, *b.sc, b.chart, 1e-8);
      worst_measure = std::max(worst_measure, rep.measure_estimate);
      int below = 0;
      for (char c : rep.below_eps) below += c;
      worst_below = std::max(worst_below, below);
      ok = ok && rep.verdict == "consistent" && rep.measure_estimate == 0.0;
    }
    // the zero function must vanish everywhere
    PhiSpec zs;
    zs.family = "zero";
    SampledGroupFunction zero = make_phi(zs, su.g);
    KernelTensor kt0 = kernel_tensor(zero, b.family, lams, su.x, workers);
    VanishingReport rep0 = pw_scan(kt0, *b.sc, b.chart, 1e-8);
    ok = ok && rep0.verdict == "zero function" &&
         rep0.measure_estimate == rep0.total_measure;
    detail << su.group << ": max measure " << fmt(worst_measure) << ", max below-eps count "
           << worst_below << "; zero-function verdict '" << rep0.verdict << "'. ";
  }
  res.pass = ok;
  res.detail = detail.str();
  return res;
}

// 7. Algebra layer: associativity of the group law, Jacobi residuals, and
// the Pfaffian-determinant identity.
CriterionResult criterion_algebra(int) {
  CriterionResult res{7, "algebra layer (associativity, Jacobi, Pfaffian)", false, "", 0.0};
  double worst_assoc = 0.0, worst_jacobi = 0.0;
  for (const auto& name : catalog_names()) {
    GroupBundle b = get_group(name);
    worst_jacobi = std::max(worst_jacobi, b.sc->jacobi_residual());
    const int n = b.sc->dim();
    for (int t = 0; t < 1000; ++t) {
      Vec a(n), c(n), d(n);
      for (int i = 0; i < n; ++i) {
        a[i] = rng_uniform(7001, 0, std::uint64_t(t) * 32 + std::uint64_t(i), -2.0, 2.0);
        c[i] = rng_uniform(7001, 1, std::uint64_t(t) * 32 + std::uint64_t(i), -2.0, 2.0);
        d[i] = rng_uniform(7001, 2, std::uint64_t(t) * 32 + std::uint64_t(i), -2.0, 2.0);
      }
      GroupElement ga{a}, gc{c}, gd{d};
      Vec lhs = b.sc->mul(b.sc->mul(ga, gc), gd).coords;
      Vec rhs = b.sc->mul(ga, b.sc->mul(gc, gd)).coords;
      worst_assoc = std::max(worst_assoc, (lhs - rhs).cwiseAbs().maxCoeff());
    }
  }

  double worst_pf = 0.0;
  for (int t = 0; t < 100; ++t) {
    for (int n : {4, 6}) {
      Mat b = Mat::Zero(n, n);
      std::uint64_t c = 0;
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
          b(i, j) = rng_uniform(7002, std::uint64_t(n), std::uint64_t(t) * 64 + c++, -1.0, 1.0);
          b(j, i) = -b(i, j);
        }
      double pf = pfaffian(b);
      double det = b.determinant();
      worst_pf = std::max(worst_pf, std::abs(pf * pf - det) / std::max(std::abs(det), 1e-30));
    }
  }
  res.pass = worst_assoc < 1e-10 && worst_jacobi < 1e-12 && worst_pf < 1e-10;
  res.detail = "associativity defect " + fmt(worst_assoc) + " (tol 1e-10), Jacobi " +
               fmt(worst_jacobi) + " (tol 1e-12), Pfaffian^2 vs det rel " + fmt(worst_pf) +
               " (tol 1e-10)";
  return res;
}

// 8. Step-3 coverage: the polarization invariants hold across the Engel
// chart and the density equals |lambda_1| to roundoff.
CriterionResult criterion_engel(int) {
  CriterionResult res{8, "step-3 polarizations and density", false, "", 0.0};
  GroupBundle en = get_group("engel");
  double worst_inv = 0.0, worst_density = 0.0;
  int tested = 0;
  for (int t = 0; t < 100; ++t) {
    Vec lam(2);
    double l1 = rng_uniform(8001, 0, std::uint64_t(t), 0.25, 4.0);
    if (rng_uniform(8001, 1, std::uint64_t(t)) < 0.5) l1 = -l1;
    lam << l1, rng_uniform(8001, 2, std::uint64_t(t), -4.0, 4.0);
    Polarization pol = vergne_polarization(*en.sc, en.chart.at(lam), en.flag);
    worst_inv = std::max(worst_inv, pol.invariant_residual(*en.sc));
    DensityValue dv = plancherel_density(*en.sc, en.chart, lam);
    worst_density =
        std::max(worst_density, std::abs(dv.r - std::abs(lam[0])) / std::abs(lam[0]));
    ++tested;
  }
  res.pass = worst_inv < 1e-10 && worst_density < 1e-12;
  res.detail = "invariant residual " + fmt(worst_inv) + " (tol 1e-10), density vs |lambda_1| " +
               fmt(worst_density) + " (tol 1e-12), " + std::to_string(tested) + " points";
  return res;
}

// 9. Determinism and resumability of the command line runner: byte-identical
// CSVs across repeated runs, 1 vs 8 workers, and an interrupted + resumed
// run.
CriterionResult criterion_determinism(const std::string& cli, int) {
  CriterionResult res{9, "CLI determinism and resumability", false, "", 0.0};
  if (cli.empty()) {
    res.detail = "no CLI binary available (set NILFOURIER_CLI)";
    return res;
  }
  fs::path dir = fs::temp_directory_path() / "nilfourier_accept9";
  fs::remove_all(dir);
  fs::create_directories(dir);

  Json cfg;
  cfg["group"] = "heisenberg";
  cfg["phi"] = {{"family", "random"}, {"seed", 97}};
  cfg["grids"] = {
      {"g", {{"axes", Json::array({{{"halfWidth", 2.0}, {"points", 9}},
                                   {{"halfWidth", 2.0}, {"points", 9}},
                                   {{"halfWidth", 2.0}, {"points", 9}}})}}},
      {"x", {{"axes", Json::array({{{"halfWidth", 3.0}, {"points", 9}}})}}},
      {"lambda", {{"axes", Json::array({{{"halfWidth", 4.0}, {"points", 9}}})}}},
  };
  cfg["workers"] = 1;
  {
    std::ofstream f(dir / "cfg.json");
    f << cfg.dump(2);
  }

  auto run = [&](const std::string& args, const std::string& outdir) {
    std::string cmd = cli + " pw-scan -c " + (dir / "cfg.json").string() + " --out " +
                      (dir / outdir).string() + " " + args + " > /dev/null 2>&1";
    return std::system(cmd.c_str());
  };
  auto slurp = [&](const std::string& outdir, const std::string& file) {
    std::ifstream f(dir / outdir / file, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
  };

  bool ok = true;
  ok = ok && run("--workers 1", "a") == 0;
  ok = ok && run("--workers 1", "b") == 0;      // repeat run
  ok = ok && run("--workers 8", "c") == 0;      // worker count must not matter
  ok = ok && run("--workers 1 --max-slots 3", "d") == 0;  // interrupted...
  ok = ok && run("--workers 8", "d") == 0;                // ...and resumed
  std::string ref_scan = slurp("a", "pw_scan.csv");
  std::string ref_sum = slurp("a", "pw_summary.csv");
  ok = ok && !ref_scan.empty() && !ref_sum.empty();
  for (const std::string& o : {std::string("b"), std::string("c"), std::string("d")}) {
    ok = ok && slurp(o, "pw_scan.csv") == ref_scan && slurp(o, "pw_summary.csv") == ref_sum;
  }
  res.pass = ok;
  res.detail = ok ? "pw-scan outputs byte-identical across reruns, 1 vs 8 workers, and "
                    "interrupt+resume"
                  : "outputs differ or a run failed (see " + dir.string() + ")";
  if (ok) fs::remove_all(dir);
  return res;
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const std::string& cli_path, int workers) {
  std::vector<CriterionResult> out;
  auto timed = [&](CriterionResult r, Clock::time_point t0) {
    r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    out.push_back(std::move(r));
  };
  {
    auto t0 = Clock::now();
    timed(criterion_abelian_fft(workers), t0);
  }
  {
    auto t0 = Clock::now();
    timed(criterion_route(workers), t0);
  }
  {
    auto t0 = Clock::now();
    timed(criterion_rep_laws(workers), t0);
  }
  {
    auto t0 = Clock::now();
    timed(criterion_oracle(workers), t0);
  }
  {
    auto t0 = Clock::now();
    timed(criterion_plancherel(workers), t0);
  }
  {
    auto t0 = Clock::now();
    timed(criterion_pw(workers), t0);
  }
  {
    auto t0 = Clock::now();
    timed(criterion_algebra(workers), t0);
  }
  {
    auto t0 = Clock::now();
    timed(criterion_engel(workers), t0);
  }
  {
    auto t0 = Clock::now();
    timed(criterion_determinism(cli_path, workers), t0);
  }
  return out;
}

bool report_acceptance(const std::vector<CriterionResult>& results) {
  bool all = true;
  for (const CriterionResult& r : results) {
    std::printf("%s  criterion %d: %s [%.1fs] - %s\n", r.pass ? "PASS" : "FAIL", r.id,
                r.name.c_str(), r.seconds, r.detail.c_str());
    all = all && r.pass;
  }
  std::printf("%s\n", all ? "ALL CRITERIA PASSED" : "SOME CRITERIA FAILED");
  return all;
}

}  // namespace nilfourier
