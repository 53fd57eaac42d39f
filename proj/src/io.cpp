#include "nilfourier/io.hpp"

#include <charconv>
#include <cstring>
#include <fstream>

namespace nilfourier {

std::string format_double(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void CsvWriter::meta(const std::string& line) { body_ += "# " + line + "\n"; }

void CsvWriter::header(const std::string& cols) { body_ += cols + "\n"; }

void CsvWriter::cell(double v) {
  if (row_open_) body_ += ',';
  body_ += format_double(v);
  row_open_ = true;
}

void CsvWriter::cell(std::int64_t v) {
  if (row_open_) body_ += ',';
  body_ += std::to_string(v);
  row_open_ = true;
}

void CsvWriter::cell(const std::string& v) {
  if (row_open_) body_ += ',';
  body_ += v;
  row_open_ = true;
}

void CsvWriter::end_row() {
  body_ += '\n';
  row_open_ = false;
}

void CsvWriter::raw(const std::string& lines) { body_ += lines; }

void CsvWriter::save(const std::filesystem::path& p) const {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw IoError("cannot write " + p.string());
  f << body_;
  if (!f) throw IoError("write failed: " + p.string());
}

std::shared_ptr<const StructureConstants> load_algebra_json(const Json& j, Mat* flag_out) {
  if (!j.contains("dim")) throw InputError("algebra file: missing 'dim'");
  int dim = j.at("dim").get<int>();
  std::string name = j.value("name", "user");
  std::vector<BracketEntry> brackets;
  for (const Json& row : j.value("brackets", Json::array())) {
    if (!row.is_array() || row.size() != 3)
      throw InputError("algebra file: each bracket must be [i, j, [coeffs...]]");
    BracketEntry e;
    e.i = row.at(0).get<int>();
    e.j = row.at(1).get<int>();
    if (e.i >= e.j)
      throw InputError("algebra file: brackets must be upper triangular (i < j)");
    auto coeffs = row.at(2);
    if (!coeffs.is_array() || int(coeffs.size()) != dim)
      throw InputError("algebra file: bracket coefficients must have length dim");
    e.coeffs = Vec(dim);
    for (int k = 0; k < dim; ++k) e.coeffs[k] = coeffs.at(size_t(k)).get<double>();
    brackets.push_back(std::move(e));
  }
  auto sc = std::make_shared<StructureConstants>(dim, brackets, name);
  if (flag_out) {
    if (j.contains("flag")) {
      const Json& fj = j.at("flag");
      if (!fj.is_array() || int(fj.size()) != dim)
        throw InputError("algebra file: 'flag' must list dim vectors");
      Mat flag(dim, dim);
      for (int c = 0; c < dim; ++c) {
        const Json& col = fj.at(size_t(c));
        if (!col.is_array() || int(col.size()) != dim)
          throw InputError("algebra file: flag vectors must have length dim");
        for (int r = 0; r < dim; ++r) flag(r, c) = col.at(size_t(r)).get<double>();
      }
      *flag_out = flag;
    } else {
      *flag_out = sc->refined_flag();
    }
  }
  return sc;
}

std::shared_ptr<const StructureConstants> load_algebra_file(const std::filesystem::path& p,
                                                            Mat* flag_out) {
  std::ifstream f(p);
  if (!f) throw IoError("cannot read " + p.string());
  Json j;
  try {
    f >> j;
  } catch (const Json::exception& e) {
    throw InputError("algebra file " + p.string() + ": " + e.what());
  }
  return load_algebra_json(j, flag_out);
}

DualChart load_chart_json(const Json& j, int dim) {
  DualChart chart;
  chart.k = j.at("k").get<int>();
  if (chart.k < 1 || chart.k > dim) throw InputError("chart file: k out of range");
  std::string mode = j.value("densityMode", "pfaffian");
  if (mode != "pfaffian")
    throw InputError("chart file: unsupported densityMode '" + mode + "'");
  const Json& em = j.at("embedMatrix");
  if (!em.is_array() || int(em.size()) != chart.k)
    throw InputError("chart file: embedMatrix must have k rows");
  chart.embed = Mat::Zero(dim, chart.k);
  for (int r = 0; r < chart.k; ++r) {
    const Json& row = em.at(size_t(r));
    if (!row.is_array() || int(row.size()) != dim)
      throw InputError("chart file: embedMatrix rows must have length dim");
    for (int c = 0; c < dim; ++c) chart.embed(c, r) = row.at(size_t(c)).get<double>();
  }
  if (j.contains("referenceLambda")) {
    const Json& rl = j.at("referenceLambda");
    if (int(rl.size()) != chart.k)
      throw InputError("chart file: referenceLambda must have length k");
    chart.reference_lambda = Vec(chart.k);
    for (int c = 0; c < chart.k; ++c) chart.reference_lambda[c] = rl.at(size_t(c)).get<double>();
  } else {
    chart.reference_lambda = Vec::Ones(chart.k);
  }
  if (j.contains("complementIndices"))
    for (const Json& v : j.at("complementIndices"))
      chart.pfaff_complement.push_back(v.get<int>());
  return chart;
}

DualChart load_chart_file(const std::filesystem::path& p, int dim) {
  std::ifstream f(p);
  if (!f) throw IoError("cannot read " + p.string());
  Json j;
  try {
    f >> j;
  } catch (const Json::exception& e) {
    throw InputError("chart file " + p.string() + ": " + e.what());
  }
  return load_chart_json(j, dim);
}

GroupBundle load_group_files(const std::filesystem::path& algebra,
                             const std::filesystem::path& chart) {
  Mat flag;
  auto sc = load_algebra_file(algebra, &flag);
  if (chart.empty())
    throw InputError("no chart available for user group '" + sc->name() +
                     "': supply a chart file ({k, embedMatrix, densityMode: \"pfaffian\"})");
  DualChart dc = load_chart_file(chart, sc->dim());
  return make_bundle(sc->name(), sc, flag, dc);
}

GridSpec grid_from_json(const Json& j) {
  if (!j.contains("axes")) throw InputError("grid: missing 'axes'");
  std::vector<Axis> axes;
  for (const Json& a : j.at("axes")) {
    Axis ax;
    ax.center = a.value("center", 0.0);
    ax.half_width = a.at("halfWidth").get<double>();
    ax.points = a.at("points").get<int>();
    axes.push_back(ax);
  }
  return GridSpec(axes);
}

Json grid_to_json(const GridSpec& g) {
  Json axes = Json::array();
  for (int d = 0; d < g.dim(); ++d) {
    const Axis& a = g.axis(d);
    axes.push_back({{"center", a.center}, {"halfWidth", a.half_width}, {"points", a.points}});
  }
  return Json{{"axes", axes}};
}

void save_phi_csv(const SampledGroupFunction& phi, const std::filesystem::path& p) {
  Json head;
  head["grid"] = grid_to_json(phi.grid);
  Json sup = Json::array();
  for (const Interval& s : phi.support) sup.push_back({s.lo, s.hi});
  head["support"] = sup;

  CsvWriter w;
  w.meta("nilfourier-phi-v1 " + head.dump());
  std::string cols;
  for (int d = 0; d < phi.grid.dim(); ++d) cols += "i" + std::to_string(d) + ",";
  cols += "re,im";
  w.header(cols);
  for (GridIter it(phi.grid); !it.done(); it.next()) {
    for (int d = 0; d < phi.grid.dim(); ++d) w.cell(std::int64_t(it.idx()[size_t(d)]));
    w.cell(phi.values[it.flat()].real());
    w.cell(phi.values[it.flat()].imag());
    w.end_row();
  }
  w.save(p);
}

SampledGroupFunction load_phi_csv(const std::filesystem::path& p) {
  std::ifstream f(p);
  if (!f) throw IoError("cannot read " + p.string());
  std::string line;
  if (!std::getline(f, line)) throw InputError("phi csv: empty file");
  const std::string tag = "# nilfourier-phi-v1 ";
  if (line.rfind(tag, 0) != 0)
    throw InputError("phi csv: missing 'nilfourier-phi-v1' header line");
  Json head;
  try {
    head = Json::parse(line.substr(tag.size()));
  } catch (const Json::exception& e) {
    throw InputError(std::string("phi csv: bad header json: ") + e.what());
  }
  SampledGroupFunction phi;
  phi.grid = grid_from_json(head.at("grid"));
  for (const Json& s : head.at("support"))
    phi.support.push_back({s.at(0).get<double>(), s.at(1).get<double>()});
  phi.values = CVec::Zero(phi.grid.size());

  if (!std::getline(f, line)) throw InputError("phi csv: missing column header");
  std::int64_t row_count = 0;
  const int nd = phi.grid.dim();
  std::vector<int> idx(size_t(nd), 0);
  while (std::getline(f, line)) {
    if (line.empty() || line[0] == '#') continue;
    const char* s = line.c_str();
    const char* end = s + line.size();
    auto next_field = [&](double& out) {
      auto res = std::from_chars(s, end, out);
      if (res.ec != std::errc()) throw InputError("phi csv: malformed number in row");
      s = res.ptr;
      if (s < end && *s == ',') ++s;
    };
    for (int d = 0; d < nd; ++d) {
      double v;
      next_field(v);
      idx[size_t(d)] = int(v);
      if (idx[size_t(d)] < 0 || idx[size_t(d)] >= phi.grid.axis(d).points)
        throw InputError("phi csv: index out of range");
    }
    double re, im;
    next_field(re);
    next_field(im);
    phi.values[phi.grid.flatten(idx)] = Complex(re, im);
    ++row_count;
  }
  if (row_count != phi.grid.size())
    throw InputError("phi csv: expected " + std::to_string(phi.grid.size()) + " rows, got " +
                     std::to_string(row_count));
  phi.validate();
  return phi;
}

void save_kernel_binary(const KernelTensor& kt, const std::filesystem::path& bin,
                        const std::filesystem::path& sidecar) {
  std::ofstream f(bin, std::ios::binary);
  if (!f) throw IoError("cannot write " + bin.string());
  const std::int64_t nx = kt.xgrid.size();
  for (const CMat& mat : kt.k) {
    // row-major (x1, x) to match the documented C order
    for (std::int64_t r = 0; r < nx; ++r)
      for (std::int64_t c = 0; c < nx; ++c) {
        double re = mat(r, c).real(), im = mat(r, c).imag();
        f.write(reinterpret_cast<const char*>(&re), sizeof(double));
        f.write(reinterpret_cast<const char*>(&im), sizeof(double));
      }
  }
  if (!f) throw IoError("write failed: " + bin.string());
  f.close();
  save_kernel_sidecar(kt.lambdas, kt.xgrid, kt.eta_grid, kt.samples_total,
                      kt.samples_out_of_box, sidecar);
}

void save_kernel_sidecar(const LambdaSet& lams, const GridSpec& xgrid, const GridSpec& eta_grid,
                         std::int64_t samples_total, std::int64_t samples_out_of_box,
                         const std::filesystem::path& sidecar) {
  Json side;
  side["format"] = "nilfourier-kernel-v1";
  side["dtype"] = "complex128 interleaved (re, im), 64-bit floats";
  side["byteOrder"] = "little";
  side["order"] = "lambda, x1, x (last fastest)";
  Json lambdas = Json::array();
  for (const Vec& lam : lams.points) {
    Json l = Json::array();
    for (int c = 0; c < lam.size(); ++c) l.push_back(lam[c]);
    lambdas.push_back(l);
  }
  side["lambdas"] = lambdas;
  Json masked = Json::array();
  for (char mk : lams.masked) masked.push_back(int(mk));
  side["masked"] = masked;
  side["xGrid"] = grid_to_json(xgrid);
  side["etaGrid"] = grid_to_json(eta_grid);
  side["shape"] = {lams.size(), xgrid.size(), xgrid.size()};
  side["samplesTotal"] = samples_total;
  side["samplesOutOfBox"] = samples_out_of_box;
  std::ofstream sf(sidecar);
  if (!sf) throw IoError("cannot write " + sidecar.string());
  sf << side.dump(2) << "\n";
}

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

RunConfig parse_run_config(const Json& in) {
  Json j = in;
  RunConfig cfg;
  if (j.contains("group")) {
    const Json& g = j.at("group");
    if (g.is_string()) {
      cfg.group = g.get<std::string>();
    } else {
      cfg.algebra_file = g.value("algebraFile", "");
      cfg.chart_file = g.value("chartFile", "");
      if (cfg.algebra_file.empty())
        throw InputError("config: group must be a preset name or {algebraFile, chartFile}");
    }
  } else {
    throw InputError("config: missing 'group'");
  }
  if (j.contains("phi")) {
    const Json& p = j.at("phi");
    cfg.phi.family = p.value("family", cfg.phi.family);
    cfg.phi.seed = p.value("seed", cfg.phi.seed);
    cfg.phi.bumps = p.value("bumps", cfg.phi.bumps);
    cfg.phi.width_lo = p.value("widthLo", cfg.phi.width_lo);
    cfg.phi.width_hi = p.value("widthHi", cfg.phi.width_hi);
    cfg.phi.center_frac = p.value("centerFrac", cfg.phi.center_frac);
    cfg.phi.width = p.value("width", cfg.phi.width);
    cfg.phi.sigma = p.value("sigma", cfg.phi.sigma);
    cfg.phi.support_frac = p.value("supportFrac", cfg.phi.support_frac);
    cfg.phi_csv = p.value("csv", "");
  }
  if (j.contains("grids")) {
    const Json& g = j.at("grids");
    if (g.contains("g")) cfg.g_grid = grid_from_json(g.at("g"));
    if (g.contains("x")) cfg.x_grid = grid_from_json(g.at("x"));
    if (g.contains("lambda")) cfg.lambda_grid = grid_from_json(g.at("lambda"));
  }
  cfg.epsilon = j.value("epsilon", cfg.epsilon);
  cfg.sv_tol = j.value("svTol", cfg.sv_tol);
  cfg.workers = j.value("workers", cfg.workers);
  if (cfg.workers < 1) throw InputError("config: workers must be >= 1");
  if (!(cfg.epsilon > 0.0)) throw InputError("config: epsilon must be positive");
  cfg.output_dir = j.value("outputDir", cfg.output_dir);
  cfg.canonical = j;
  cfg.fingerprint = fnv1a64(j.dump());
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& p) {
  std::ifstream f(p);
  if (!f) throw IoError("cannot read config " + p.string());
  Json j;
  try {
    f >> j;
  } catch (const Json::exception& e) {
    throw InputError("config " + p.string() + ": " + e.what());
  }
  return parse_run_config(j);
}

void apply_override(Json& j, const std::string& assignment) {
  auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw InputError("override must look like path.to.key=value: " + assignment);
  std::string path = assignment.substr(0, eq);
  std::string value = assignment.substr(eq + 1);

  Json* node = &j;
  size_t pos = 0;
  while (true) {
    size_t dot = path.find('.', pos);
    std::string key = path.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos);
    if (key.empty()) throw InputError("override has an empty path segment: " + assignment);
    bool last = dot == std::string::npos;
    bool is_index = !key.empty() && key.find_first_not_of("0123456789") == std::string::npos;
    if (is_index) {
      size_t idx = size_t(std::stoul(key));
      if (!node->is_array() || idx >= node->size())
        throw InputError("override index out of range: " + assignment);
      node = &(*node)[idx];
    } else {
      node = &(*node)[key];
    }
    if (last) break;
    pos = dot + 1;
  }
  try {
    *node = Json::parse(value);
  } catch (const Json::exception&) {
    *node = value;  // plain string
  }
}

}  // namespace nilfourier
