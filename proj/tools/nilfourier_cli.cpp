// Batch front-end: configure a group, a test function, and grids; run the
// transform experiments; emit CSV reports. Deterministic given config + seed;
// lambda-parallel commands stage per-slot payloads so interrupted runs resume.
#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <unistd.h>

#include "nilfourier/acceptance.hpp"
#include "nilfourier/io.hpp"
#include "nilfourier/runner.hpp"

namespace fs = std::filesystem;
using namespace nilfourier;

namespace {

struct Context {
  RunConfig cfg;
  GroupBundle bundle;
  GridSpec g_grid, x_grid, lambda_grid;
  fs::path out;
};

Context make_context(RunConfig cfg) {
  GroupBundle bundle = cfg.group.empty() ? load_group_files(cfg.algebra_file, cfg.chart_file)
                                         : get_group(cfg.group);
  Context cx{std::move(cfg), std::move(bundle), GridSpec{}, GridSpec{}, GridSpec{}, {}};
  cx.g_grid = cx.cfg.g_grid.value_or(cx.bundle.g_grid);
  cx.x_grid = cx.cfg.x_grid.value_or(cx.bundle.x_grid);
  cx.lambda_grid = cx.cfg.lambda_grid.value_or(cx.bundle.lambda_grid);

  const int n = cx.bundle.sc->dim();
  const int q = cx.bundle.geometry().dim_x();
  const int k = cx.bundle.chart.k;
  if (cx.g_grid.dim() != n)
    throw InputError("config: grids.g must have " + std::to_string(n) +
                     " axes (group dimension), got " + std::to_string(cx.g_grid.dim()));
  if (cx.x_grid.dim() != q)
    throw InputError("config: grids.x must have " + std::to_string(q) +
                     " axes (dim of H\\G), got " + std::to_string(cx.x_grid.dim()));
  if (cx.lambda_grid.dim() != k)
    throw InputError("config: grids.lambda must have " + std::to_string(k) +
                     " axes (chart dimension), got " + std::to_string(cx.lambda_grid.dim()));

  cx.out = cx.cfg.output_dir;
  fs::create_directories(cx.out);
  return cx;
}

SampledGroupFunction make_phi_for(const Context& cx) {
  if (!cx.cfg.phi_csv.empty()) {
    SampledGroupFunction phi = load_phi_csv(cx.cfg.phi_csv);
    if (!(phi.grid == cx.g_grid))
      throw InputError("config: phi csv grid differs from grids.g");
    return phi;
  }
  return make_phi(cx.cfg.phi, cx.g_grid);
}

std::string lambda_cols(int k) {
  std::string s;
  for (int c = 0; c < k; ++c) s += "lambda_" + std::to_string(c) + ",";
  return s;
}

void lambda_cells(CsvWriter& w, const Vec& lam) {
  for (int c = 0; c < lam.size(); ++c) w.cell(lam[c]);
}

void common_meta(CsvWriter& w, const Context& cx) {
  w.meta("group: " + cx.bundle.name);
  w.meta("config fingerprint: " + std::to_string(cx.cfg.fingerprint));
}

// Runs a per-lambda slotted command: compute pending slots (honoring
// max_slots), then assemble the final outputs once everything is present.
// Returns false when the run stopped partial.
bool run_lambda_slots(const Context& cx, const std::string& tag, int max_slots,
                      const LambdaSet& lams, const std::function<std::string(int)>& slot_fn,
                      const std::function<void(const std::vector<std::string>&)>& assemble) {
  SlotRunner runner(cx.out / (".staging-" + tag), cx.cfg.fingerprint ^ fnv1a64(tag),
                    int(lams.size()));
  runner.run(cx.cfg.workers, max_slots, slot_fn);
  if (!runner.all_done()) {
    std::cout << tag << ": partial run, " << runner.done_count() << "/" << runner.total()
              << " lambda slots complete; rerun with the same config to resume\n";
    return false;
  }
  std::vector<std::string> payloads;
  payloads.reserve(size_t(runner.total()));
  for (int i = 0; i < runner.total(); ++i) payloads.push_back(runner.fetch(i));
  assemble(payloads);
  runner.clear();
  return true;
}

int cmd_catalog(bool as_json) {
  if (as_json) {
    Json out = Json::array();
    for (const auto& name : catalog_names()) {
      GroupBundle b = get_group(name);
      Json row;
      row["name"] = b.name;
      row["dim"] = b.sc->dim();
      row["step"] = b.sc->step();
      row["chartDim"] = b.chart.k;
      row["xDim"] = b.geometry().dim_x();
      row["gGrid"] = grid_to_json(b.g_grid);
      row["xGrid"] = grid_to_json(b.x_grid);
      row["lambdaGrid"] = grid_to_json(b.lambda_grid);
      out.push_back(row);
    }
    std::cout << out.dump(2) << "\n";
    return 0;
  }
  std::cout << "name        n  step  k  dim(H\\G)  reference grids (G / X / lambda)\n";
  for (const auto& name : catalog_names()) {
    GroupBundle b = get_group(name);
    auto gdesc = [](const GridSpec& g) {
      std::string s;
      for (int d = 0; d < g.dim(); ++d) {
        if (d) s += "x";
        s += std::to_string(g.axis(d).points);
      }
      if (g.dim() == 0) s = "point";
      return s;
    };
    std::printf("%-10s %2d  %4d  %d  %8d  %s / %s / %s\n", b.name.c_str(), b.sc->dim(),
                b.sc->step(), b.chart.k, b.geometry().dim_x(), gdesc(b.g_grid).c_str(),
                gdesc(b.x_grid).c_str(), gdesc(b.lambda_grid).c_str());
  }
  return 0;
}

int cmd_fourier(const Context& cx, int max_slots) {
  SampledGroupFunction phi = make_phi_for(cx);
  LambdaSet lams = LambdaSet::from_grid(cx.lambda_grid, *cx.bundle.sc, cx.bundle.chart);

  auto slot = [&](int l) {
    LambdaSet one = LambdaSet::from_points({lams.points[size_t(l)]});
    one.masked[0] = lams.masked[size_t(l)];
    auto ops = group_fourier_direct(phi, cx.bundle.family, cx.x_grid, one, 1);
    CsvWriter w;
    const CMat& m = ops[0].mat;
    for (std::int64_t r = 0; r < m.rows(); ++r)
      for (std::int64_t c = 0; c < m.cols(); ++c) {
        lambda_cells(w, lams.points[size_t(l)]);
        w.cell(r);
        w.cell(c);
        w.cell(m(r, c).real());
        w.cell(m(r, c).imag());
        w.end_row();
      }
    return w.str();
  };
  auto assemble = [&](const std::vector<std::string>& payloads) {
    CsvWriter w;
    common_meta(w, cx);
    w.meta("operator matrices of the group Fourier transform; weights baked into entries");
    w.header(lambda_cols(cx.bundle.chart.k) + "row,col,re,im");
    for (const auto& p : payloads) w.raw(p);
    w.save(cx.out / "fourier.csv");
  };
  return run_lambda_slots(cx, "fourier", max_slots, lams, slot, assemble) ? 0 : 0;
}

int cmd_kernel(const Context& cx, int max_slots) {
  SampledGroupFunction phi = make_phi_for(cx);
  LambdaSet lams = LambdaSet::from_grid(cx.lambda_grid, *cx.bundle.sc, cx.bundle.chart);
  GridSpec eta = kernel_slice_grid(phi, cx.bundle.geometry(), cx.x_grid);

  auto slot = [&](int l) {
    LambdaSet one = LambdaSet::from_points({lams.points[size_t(l)]});
    one.masked[0] = lams.masked[size_t(l)];
    KernelTensor kt = kernel_tensor(phi, cx.bundle.family, one, cx.x_grid, 1);
    OperatorMatrix from_kernel = operator_from_kernel(kt, 0);
    auto direct = group_fourier_direct(phi, cx.bundle.family, cx.x_grid, one, 1);
    double hs_d = std::sqrt(hs_norm_sq(direct[0]));
    double hs_k = std::sqrt(hs_norm_sq(from_kernel));
    OperatorMatrix diff{direct[0].lambda, direct[0].mat - from_kernel.mat, cx.x_grid};
    double rel = hs_d > 0 ? std::sqrt(hs_norm_sq(diff)) / hs_d : 0.0;
    double oob_frac =
        kt.samples_total ? double(kt.samples_out_of_box) / double(kt.samples_total) : 0.0;

    CsvWriter row;
    lambda_cells(row, lams.points[size_t(l)]);
    row.cell(hs_d);
    row.cell(hs_k);
    row.cell(rel);
    row.cell(oob_frac);
    row.cell(std::int64_t(lams.masked[size_t(l)]));
    row.end_row();

    std::string payload = row.str();  // first line: csv row
    const CMat& m = kt.k[0];
    payload.reserve(payload.size() + size_t(m.size()) * 16);
    for (std::int64_t r = 0; r < m.rows(); ++r)
      for (std::int64_t c = 0; c < m.cols(); ++c) {
        double re = m(r, c).real(), im = m(r, c).imag();
        payload.append(reinterpret_cast<const char*>(&re), sizeof(double));
        payload.append(reinterpret_cast<const char*>(&im), sizeof(double));
      }
    return payload;
  };

  auto assemble = [&](const std::vector<std::string>& payloads) {
    // route-equivalence report: tolerance recorded in the header scales as
    // C h^2 with C = 2 calibrated on the reference grids
    double h = 0.0;
    for (int d = 0; d < cx.g_grid.dim(); ++d) h = std::max(h, cx.g_grid.axis(d).spacing());
    CsvWriter w;
    common_meta(w, cx);
    w.meta("route equivalence: direct quadrature vs kernel-integral assembly");
    w.meta("tolerance: rel_err <= 2 * h^2 = " + format_double(2.0 * h * h) +
           " on unmasked lambdas (h = max G-grid spacing)");
    w.header(lambda_cols(cx.bundle.chart.k) + "hs_direct,hs_kernel,rel_err,slice_oob_frac,masked");
    std::string bin;
    for (const auto& p : payloads) {
      size_t nl = p.find('\n');
      w.raw(p.substr(0, nl + 1));
      bin += p.substr(nl + 1);
    }
    w.save(cx.out / "route_equivalence.csv");

    std::ofstream bf(cx.out / "kernel.bin", std::ios::binary);
    if (!bf) throw IoError("cannot write kernel.bin");
    bf << bin;
    bf.close();

    save_kernel_sidecar(lams, cx.x_grid, eta, eta.size() * cx.x_grid.size() * cx.x_grid.size() *
                            lams.size(), -1, cx.out / "kernel.json");
  };
  return run_lambda_slots(cx, "kernel", max_slots, lams, slot, assemble) ? 0 : 0;
}

int cmd_plancherel(const Context& cx) {
  SampledGroupFunction phi = make_phi_for(cx);
  LambdaSet lams = LambdaSet::from_grid(cx.lambda_grid, *cx.bundle.sc, cx.bundle.chart);
  PlancherelResult res = plancherel_check(phi, cx.bundle.family, lams, cx.x_grid, cx.cfg.workers);

  CsvWriter w;
  common_meta(w, cx);
  w.header(lambda_cols(cx.bundle.chart.k) + "hs_sq,density,masked");
  for (std::int64_t l = 0; l < lams.size(); ++l) {
    lambda_cells(w, lams.points[size_t(l)]);
    w.cell(res.per_lambda_hs_sq[l]);
    w.cell(res.per_lambda_density[l]);
    w.cell(std::int64_t(lams.masked[size_t(l)]));
    w.end_row();
  }
  w.save(cx.out / "plancherel.csv");

  CsvWriter s;
  common_meta(s, cx);
  s.header("ratio,l2_norm_sq,integral,tail_fraction,tail_warning,degenerate");
  s.cell(res.ratio);
  s.cell(res.l2_norm_sq);
  s.cell(res.integral);
  s.cell(res.tail_fraction);
  s.cell(std::int64_t(res.tail_warning));
  s.cell(std::int64_t(res.degenerate));
  s.end_row();
  s.save(cx.out / "plancherel_summary.csv");

  std::cout << "plancherel ratio: " << format_double(res.ratio)
            << (res.degenerate ? " (degenerate: zero function)" : "")
            << (res.tail_warning ? " [tail warning]" : "") << "\n";
  return 0;
}

int cmd_pw_scan(const Context& cx, int max_slots) {
  SampledGroupFunction phi = make_phi_for(cx);
  LambdaSet lams = LambdaSet::from_grid(cx.lambda_grid, *cx.bundle.sc, cx.bundle.chart);

  auto slot = [&](int l) {
    if (lams.masked[size_t(l)]) return std::string("masked\n");
    LambdaSet one = LambdaSet::from_points({lams.points[size_t(l)]});
    KernelTensor kt = kernel_tensor(phi, cx.bundle.family, one, cx.x_grid, 1);
    return format_double(kt.hs_norm(0)) + "\n";
  };
  auto assemble = [&](const std::vector<std::string>& payloads) {
    Vec norms = Vec::Zero(lams.size());
    for (std::int64_t l = 0; l < lams.size(); ++l) {
      const std::string& p = payloads[size_t(l)];
      if (p.rfind("masked", 0) == 0) continue;
      norms[l] = std::stod(p);
    }
    VanishingReport rep = pw_scan_norms(lams, norms, *cx.bundle.sc, cx.bundle.chart,
                                        cx.cfg.epsilon);
    CsvWriter w;
    common_meta(w, cx);
    w.header(lambda_cols(cx.bundle.chart.k) + "hs_norm,below_eps,masked");
    for (std::int64_t l = 0; l < lams.size(); ++l) {
      lambda_cells(w, lams.points[size_t(l)]);
      w.cell(norms[l]);
      w.cell(std::int64_t(rep.below_eps[size_t(l)]));
      w.cell(std::int64_t(lams.masked[size_t(l)]));
      w.end_row();
    }
    w.save(cx.out / "pw_scan.csv");

    CsvWriter s;
    common_meta(s, cx);
    s.header("eps_abs,k_norm_max,vanishing_count,measure_estimate,total_measure,resolution,verdict");
    std::int64_t count = 0;
    for (char c : rep.below_eps) count += c;
    s.cell(rep.eps_abs);
    s.cell(rep.k_norm_max);
    s.cell(count);
    s.cell(rep.measure_estimate);
    s.cell(rep.total_measure);
    s.cell(rep.resolution);
    s.cell(rep.verdict);
    s.end_row();
    s.save(cx.out / "pw_summary.csv");
    std::cout << "pw-scan verdict: " << rep.verdict << " (vanishing measure estimate "
              << format_double(rep.measure_estimate) << " at resolution "
              << format_double(rep.resolution) << ")\n";
  };
  return run_lambda_slots(cx, "pw-scan", max_slots, lams, slot, assemble) ? 0 : 0;
}

int cmd_probe_invert(const Context& cx, int max_slots) {
  SampledGroupFunction phi = make_phi_for(cx);
  LambdaSet lams = LambdaSet::from_grid(cx.lambda_grid, *cx.bundle.sc, cx.bundle.chart);

  auto slot = [&](int l) {
    LambdaSet one = LambdaSet::from_points({lams.points[size_t(l)]});
    one.masked[0] = lams.masked[size_t(l)];
    auto ops = group_fourier_direct(phi, cx.bundle.family, cx.x_grid, one, 1);
    auto rows = invertibility_probe(ops, one, cx.cfg.sv_tol);
    CsvWriter w;
    lambda_cells(w, lams.points[size_t(l)]);
    w.cell(rows[0].sigma_min);
    w.cell(rows[0].sigma_max);
    w.cell(std::int64_t(rows[0].rank));
    w.cell(std::int64_t(rows[0].near_singular));
    w.cell(std::int64_t(rows[0].masked));
    w.end_row();
    return w.str();
  };
  auto assemble = [&](const std::vector<std::string>& payloads) {
    CsvWriter w;
    common_meta(w, cx);
    w.meta("singular values of the discretized operators; exploratory evidence only");
    w.header(lambda_cols(cx.bundle.chart.k) +
             "sigma_min,sigma_max,rank,near_singular,masked");
    for (const auto& p : payloads) w.raw(p);
    w.save(cx.out / "invertibility.csv");
  };
  return run_lambda_slots(cx, "probe-invert", max_slots, lams, slot, assemble) ? 0 : 0;
}

std::string self_exe(const char* argv0) {
  char buf[4096];
  ssize_t n = ::readlink("/proc/self/exe", buf, sizeof(buf) - 1);
  if (n > 0) {
    buf[n] = '\0';
    return std::string(buf);
  }
  return std::string(argv0);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nilfourier: noncommutative Fourier analysis on nilpotent Lie groups"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  int workers_flag = 0;
  std::string out_flag;
  int max_slots = -1;

  auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* copt = sub->add_option("-c,--config", config_path, "JSON run configuration");
    if (needs_config) copt->required();
    sub->add_option("--set", overrides, "override a config leaf: path.to.key=value");
    sub->add_option("--workers", workers_flag, "worker thread count (overrides config)");
    sub->add_option("--out", out_flag, "output directory (overrides config)");
  };

  CLI::App* c_catalog = app.add_subcommand("catalog", "list the group presets");
  bool catalog_json = false;
  c_catalog->add_flag("--json", catalog_json, "emit JSON");

  CLI::App* c_fourier =
      app.add_subcommand("fourier", "operator matrices of the transform, per lambda");
  CLI::App* c_kernel =
      app.add_subcommand("kernel", "kernel tensor dump and route-equivalence report");
  CLI::App* c_plancherel = app.add_subcommand("plancherel", "Plancherel ratio report");
  CLI::App* c_pw = app.add_subcommand("pw-scan", "vanishing-set scan of the kernel family");
  CLI::App* c_probe =
      app.add_subcommand("probe-invert", "singular-value probe of the operators");
  CLI::App* c_selftest = app.add_subcommand("selftest", "run the full acceptance suite");

  for (CLI::App* sub : {c_fourier, c_kernel, c_plancherel, c_pw, c_probe}) {
    add_common(sub, true);
    sub->add_option("--max-slots", max_slots,
                    "stop after N newly computed lambda slots (partial run)");
  }
  int selftest_workers = 1;
  c_selftest->add_option("--workers", selftest_workers, "worker thread count");

  CLI11_PARSE(app, argc, argv);

  try {
    if (c_catalog->parsed()) return cmd_catalog(catalog_json);
    if (c_selftest->parsed()) {
      auto results = run_acceptance(self_exe(argv[0]), selftest_workers);
      return report_acceptance(results) ? 0 : 2;
    }

    RunConfig cfg;
    {
      std::ifstream f(config_path);
      if (!f) throw IoError("cannot read config " + config_path);
      Json j;
      try {
        f >> j;
      } catch (const Json::exception& e) {
        throw InputError("config " + config_path + ": " + e.what());
      }
      for (const std::string& ov : overrides) apply_override(j, ov);
      if (workers_flag > 0) j["workers"] = workers_flag;
      if (!out_flag.empty()) j["outputDir"] = out_flag;
      cfg = parse_run_config(j);
    }
    Context cx = make_context(std::move(cfg));

    if (c_fourier->parsed()) return cmd_fourier(cx, max_slots);
    if (c_kernel->parsed()) return cmd_kernel(cx, max_slots);
    if (c_plancherel->parsed()) return cmd_plancherel(cx);
    if (c_pw->parsed()) return cmd_pw_scan(cx, max_slots);
    if (c_probe->parsed()) return cmd_probe_invert(cx, max_slots);
    throw InputError("no subcommand");
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 3;
  } catch (const InternalError& e) {
    std::cerr << "numerical check failed: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
