#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "nilfourier/io.hpp"
#include "nilfourier/runner.hpp"
#include "test_support.hpp"

using namespace nilfourier;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& tag) {
  fs::path p = fs::temp_directory_path() / ("nilf_test_" + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_SUITE_BEGIN("io");

TEST_CASE("algebra json round trip and errors") {
  Json j = {
      {"name", "heis_file"},
      {"dim", 3},
      {"brackets", Json::array({Json::array({0, 1, Json::array({0, 0, 1})})})},
  };
  Mat flag;
  auto sc = load_algebra_json(j, &flag);
  CHECK(sc->dim() == 3);
  CHECK(sc->step() == 2);
  CHECK(sc->bracket_coeff(0, 1, 2) == 1.0);
  CHECK(sc->bracket_coeff(1, 0, 2) == -1.0);
  CHECK(flag.cols() == 3);

  Json bad = j;
  bad["brackets"].push_back(Json::array({1, 0, Json::array({0, 0, 1})}));
  CHECK_THROWS_WITH_AS(load_algebra_json(bad, nullptr), doctest::Contains("upper triangular"),
                       InputError);

  Json bad2 = j;
  bad2["brackets"].push_back(Json::array({0, 2, Json::array({1, 0, 0})}));
  CHECK_THROWS_WITH_AS(load_algebra_json(bad2, nullptr), doctest::Contains("Jacobi"), InputError);
}

TEST_CASE("user group files build a working bundle") {
  GroupBundle b = load_group_files(std::string(NILF_TEST_DATA_DIR) + "/h2.json",
                                   std::string(NILF_TEST_DATA_DIR) + "/h2_chart.json");
  CHECK(b.sc->dim() == 5);
  CHECK(b.geometry().dim_h() == 3);
  CHECK(b.geometry().dim_x() == 2);
  // R(lambda) = lambda^2 for the two-oscillator pairing
  DensityValue dv = plancherel_density(*b.sc, b.chart, Vec::Constant(1, 1.5));
  CHECK(dv.r == doctest::Approx(2.25).epsilon(1e-12));
}

TEST_CASE("missing chart for a user group is an error") {
  CHECK_THROWS_WITH_AS(load_group_files(std::string(NILF_TEST_DATA_DIR) + "/h2.json", ""),
                       doctest::Contains("no chart available"), InputError);
}

TEST_CASE("phi csv round trip") {
  GroupBundle h = get_group("heisenberg");
  GridSpec gg({{0.0, 2.0, 9}, {0.0, 2.0, 9}, {0.0, 2.0, 9}});
  PhiSpec spec;
  spec.family = "random";
  spec.seed = 5;
  SampledGroupFunction phi = make_phi(spec, gg);
  fs::path dir = temp_dir("phicsv");
  save_phi_csv(phi, dir / "phi.csv");
  SampledGroupFunction back = load_phi_csv(dir / "phi.csv");
  CHECK(back.grid == phi.grid);
  CHECK((back.values - phi.values).cwiseAbs().maxCoeff() == 0.0);
  fs::remove_all(dir);
}

TEST_CASE("config parsing, defaults, and overrides") {
  Json j = {
      {"group", "heisenberg"},
      {"phi", {{"family", "random"}, {"seed", 42}}},
      {"epsilon", 1e-8},
      {"workers", 2},
      {"outputDir", "outdir"},
  };
  RunConfig cfg = parse_run_config(j);
  CHECK(cfg.group == "heisenberg");
  CHECK(cfg.phi.seed == 42);
  CHECK(cfg.workers == 2);
  CHECK(!cfg.g_grid.has_value());

  Json j2 = j;
  apply_override(j2, "phi.seed=7");
  apply_override(j2, "grids.lambda={\"axes\":[{\"halfWidth\":4.0,\"points\":9}]}");
  RunConfig cfg2 = parse_run_config(j2);
  CHECK(cfg2.phi.seed == 7);
  REQUIRE(cfg2.lambda_grid.has_value());
  CHECK(cfg2.lambda_grid->axis(0).points == 9);
  CHECK(cfg2.fingerprint != cfg.fingerprint);

  RunConfig cfg3 = parse_run_config(j);
  CHECK(cfg3.fingerprint == cfg.fingerprint);  // stable across parses

  Json bad = j;
  bad["workers"] = 0;
  CHECK_THROWS_WITH_AS(parse_run_config(bad), doctest::Contains("workers"), InputError);
  Json bad2 = j;
  bad2.erase("group");
  CHECK_THROWS_AS(parse_run_config(bad2), InputError);
}

TEST_CASE("grid json validation") {
  Json g = {{"axes", Json::array({{{"halfWidth", 2.0}, {"points", 8}}})}};
  CHECK_THROWS_WITH_AS(grid_from_json(g), doctest::Contains("odd"), InputError);
  Json g2 = {{"axes", Json::array({{{"halfWidth", 2.0}, {"points", 9}}})}};
  GridSpec gs = grid_from_json(g2);
  CHECK(gs.axis(0).points == 9);
  CHECK(gs.axis(0).center == 0.0);
}

TEST_CASE("format_double round trips") {
  for (double v : {0.0, 1.0, -1.5, 0.1, 3.141592653589793, 1e-300, -2.2250738585072014e-308}) {
    CHECK(std::stod(format_double(v)) == v);
  }
}

TEST_SUITE_END();

TEST_SUITE_BEGIN("runner");

TEST_CASE("slots resume without recomputation and survive fingerprint changes") {
  fs::path dir = temp_dir("slots");
  int calls = 0;
  auto fn = [&](int slot) {
    ++calls;
    return "payload-" + std::to_string(slot) + "\n";
  };

  SlotRunner r1(dir / "stage", 111, 6);
  CHECK(r1.run(1, 3, fn) == 3);  // partial run
  CHECK(calls == 3);
  CHECK(!r1.all_done());

  SlotRunner r2(dir / "stage", 111, 6);  // same fingerprint: resume
  CHECK(r2.done_count() == 3);
  CHECK(r2.run(2, -1, fn) == 3);
  CHECK(calls == 6);
  CHECK(r2.all_done());

  std::string assembled;
  for (int i = 0; i < 6; ++i) assembled += r2.fetch(i);
  CHECK(assembled ==
        "payload-0\npayload-1\npayload-2\npayload-3\npayload-4\npayload-5\n");

  SlotRunner r3(dir / "stage", 222, 6);  // changed fingerprint: start over
  CHECK(r3.done_count() == 0);

  r3.clear();
  CHECK(!fs::exists(dir / "stage"));
  fs::remove_all(dir);
}

TEST_CASE("parallel slot execution produces identical payloads") {
  fs::path dir = temp_dir("slots_par");
  auto fn = [&](int slot) { return "s" + std::to_string(slot) + ";"; };
  SlotRunner a(dir / "a", 5, 12);
  a.run(1, -1, fn);
  SlotRunner b(dir / "b", 5, 12);
  b.run(8, -1, fn);
  std::string sa, sb;
  for (int i = 0; i < 12; ++i) {
    sa += a.fetch(i);
    sb += b.fetch(i);
  }
  CHECK(sa == sb);
  fs::remove_all(dir);
}

TEST_SUITE_END();
