#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vempoly/study.hpp>
#include <vempoly/svg.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace vempoly;

namespace {

std::string slurp(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

} // namespace

TEST_CASE("study config: defaults, JSON fields and overrides")
{
  StudyConfig cfg = study_config_from_json_string("{}");
  CHECK(cfg.kind == StudyKind::Test1Quads);
  CHECK(cfg.orders.size() == 6);
  CHECK(cfg.stabs.size() == 1);

  cfg = study_config_from_json_string(R"({
    "study": "test2_voronoi",
    "orders": [[2, 1], [3, 2]],
    "stabs": ["trace", "dofi-light"],
    "voronoi_seeds_list": [16, 64],
    "rng_seed": 7,
    "solver_tol": 1e-10,
    "out": "somewhere"
  })");
  CHECK(cfg.kind == StudyKind::Test2Voronoi);
  REQUIRE(cfg.orders.size() == 2);
  CHECK(cfg.orders[1].ko == 3);
  CHECK(cfg.stabs[0] == StabilizationKind::Trace);
  CHECK(cfg.voronoi_seeds_list == std::vector<int>{16, 64});
  CHECK(cfg.rng_seed == 7);
  CHECK(cfg.out_dir == "somewhere");

  CHECK_THROWS(study_config_from_json_string("{\"study\": \"bogus\"}"));
  CHECK_THROWS(study_config_from_json_string("not json"));
}

TEST_CASE("CSV rendering is byte-stable")
{
  std::vector<StudyRow> rows = {
      {"quads", 2, 1, "dofi", 0.3535533906, 0.0220970869, 1.0, 48, 1234, 1.5e-3, 2.5e-3}};
  std::string csv = rows_to_csv(rows);
  CHECK(csv ==
        "family,ko,kb,stab,h,h_bnd,H_ratio,ell_max,ndof,err_bulk,err_trace\n"
        "quads,2,1,dofi,3.53553391e-01,2.20970869e-02,1.00000000e+00,48,1234,1.50000000e-03,"
        "2.50000000e-03\n");
  CHECK(rows_to_csv({}) ==
        "family,ko,kb,stab,h,h_bnd,H_ratio,ell_max,ndof,err_bulk,err_trace\n");
}

TEST_CASE("SVG rendering: markers, slope annotation, deterministic bytes")
{
  SvgSeries s;
  s.label = "k=(2,1)";
  s.points = {{0.25, 1e-2}, {0.125, 2.5e-3}, {0.0625, 6.2e-4}, {0.03125, 1.6e-4}};
  s.slope = 1.99;
  std::string svg = render_loglog_svg({s}, "demo", "h", "err");
  // One marker per point plus the legend swatch.
  size_t markers = 0;
  for (size_t pos = svg.find("<circle"); pos != std::string::npos;
       pos = svg.find("<circle", pos + 1))
    ++markers;
  CHECK(markers == 4);
  CHECK(svg.find("slope 1.99") != std::string::npos);
  CHECK(render_loglog_svg({s}, "demo", "h", "err") == svg);
  CHECK(svg == slurp(std::string(VEMPOLY_TEST_DATA_DIR) + "/golden_plot.svg"));
  CHECK_THROWS(render_loglog_svg({SvgSeries{"bad", {{-1.0, 2.0}}, 0.0, false}}, "t", "x", "y"));
}

TEST_CASE("h12 study emits the pinned CSV schema")
{
  StudyConfig cfg;
  cfg.kind = StudyKind::H12;
  cfg.h12_n = {8, 16};
  cfg.pqu_ratios = {1.0, 10.0};
  StudyResult result = run_study(cfg);
  REQUIRE(result.h12_rows.size() == 2);
  REQUIRE(result.h12_pqu_rows.size() == 2);
  std::string csv = h12_to_csv(result.h12_rows, "N");
  CHECK(csv.rfind("N,seminorm,bound,ratio\n", 0) == 0);
  CHECK(result.h12_rows[0].ratio > 0.0);
}

TEST_CASE("a small study runs end to end, deterministically, with reports")
{
  namespace fs = std::filesystem;
  StudyConfig cfg;
  cfg.kind = StudyKind::Test2Voronoi;
  cfg.orders = {Orders(1, 1), Orders(2, 1)};
  cfg.stabs = {StabilizationKind::DofiDofi};
  cfg.voronoi_seeds_list = {9, 16, 25};
  cfg.lloyd_iters = 40;
  cfg.out_dir = (fs::temp_directory_path() / "vempoly_study_out").string();

  StudyResult a = run_study(cfg);
  StudyResult b = run_study(cfg);
  CHECK(rows_to_csv(a.rows) == rows_to_csv(b.rows));
  REQUIRE(a.rows.size() == 6);
  // Enrichment helps on every mesh.
  for (int m = 0; m < 3; ++m) CHECK(a.rows[2 * m + 1].err_bulk < a.rows[2 * m].err_bulk);
  // Rates fitted over three meshes for both quantities and orders.
  CHECK(a.rates.size() == 4);

  emit_reports(a, cfg);
  std::string csv = slurp(cfg.out_dir + "/test2_voronoi_errors.csv");
  CHECK(csv == rows_to_csv(a.rows));
  std::string svg = slurp(cfg.out_dir + "/test2_voronoi_err_bulk.svg");
  CHECK(svg.find("<svg") == 0);
  fs::remove_all(cfg.out_dir);
}

TEST_CASE("study aborts fast when the patch test cannot pass")
{
  // A hobbled iterative solver (huge tolerance) cannot reproduce the patch
  // polynomial; the first-mesh check must abort the study before any rates.
  StudyConfig cfg;
  cfg.kind = StudyKind::Test2Voronoi;
  cfg.orders = {Orders(1, 1)};
  cfg.voronoi_seeds_list = {16};
  cfg.lloyd_iters = 20;
  cfg.solver_tol = 0.5;
  cfg.direct_threshold = 0;
  CHECK_THROWS_WITH_AS(run_study(cfg), doctest::Contains("patch test"), std::runtime_error);
}
