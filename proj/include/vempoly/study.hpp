#pragma once

#include <vempoly/errors.hpp>
#include <vempoly/forms.hpp>
#include <vempoly/manufactured.hpp>
#include <vempoly/mesh.hpp>
#include <vempoly/solve.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace vempoly {

enum class StudyKind {
  Test1Quads,      // h-refinement of subdivided quad meshes
  Test1Voronoi,    // edge refinement at fixed Voronoi diameter
  Test2Voronoi,    // enriched vs standard orders on Voronoi meshes
  Test3Agglomerate,// enrichment gain on agglomerated meshes
  H12,             // appendix seminorm study
  SingleSolve,     // one mesh, one order pair
};

StudyKind parse_study_kind(const std::string& name);
std::string study_kind_name(StudyKind kind);

struct StudyConfig {
  StudyKind kind = StudyKind::Test1Quads;
  std::vector<Orders> orders;
  std::vector<StabilizationKind> stabs = {StabilizationKind::DofiDofi};

  std::vector<int> quad_n = {4, 8, 16, 32};    // cells per side (test1_quads)
  int edge_split = 16;                          // h_bnd = h / edge_split
  int voronoi_seeds = 256;                      // test1_voronoi base mesh
  std::vector<int> edge_split_list = {1, 2, 4, 8};
  std::vector<int> voronoi_seeds_list = {16, 64, 256}; // test2
  int fine_n = 32;                              // test3 fine quad mesh
  std::vector<int> agglomerate_seeds = {256, 64, 16};
  std::vector<int> h12_n = {8, 16, 32, 64};
  std::vector<double> pqu_ratios = {1.0, 10.0, 100.0, 1000.0};

  std::uint64_t rng_seed = 42;
  int lloyd_iters = 100;
  double solver_tol = 1e-12;
  double stab_multiplier = 1.0;
  int direct_threshold = 20000;
  bool condense = true;
  std::string out_dir = ".";
  std::string mesh_path; // single solve
};

/// Parses the JSON config format; every key is optional and falls back to the
/// study defaults above.
StudyConfig study_config_from_json_file(const std::string& path);
StudyConfig study_config_from_json_string(const std::string& text);

/// One CSV row of the error table (pinned column schema).
struct StudyRow {
  std::string family;
  int ko, kb;
  std::string stab;
  double h, h_bnd, H_ratio;
  int ell_max;
  int ndof;
  double err_bulk, err_trace;
};

struct RateSummary {
  std::string family;
  int ko, kb;
  std::string stab;
  std::string quantity; // err_bulk / err_trace
  double slope;
  double residual;
};

struct H12Row {
  int n;
  double seminorm_sq;
  double bound; // log(1 + R_h) * sum of squared edge sup norms
  double ratio;
};

struct StudyResult {
  std::vector<StudyRow> rows;
  std::vector<RateSummary> rates;
  std::vector<H12Row> h12_rows;      // psi_N sweep
  std::vector<H12Row> h12_pqu_rows;  // n holds R_h for these
};

StudyResult run_study(const StudyConfig& config);

/// Max DoF deviation of the discrete solution from the interpolant of a
/// global polynomial with matching load and boundary data.
double patch_test_max_dof_error(const PolyMesh& mesh, const MeshTopology& topo,
                                const DofLayout& layout,
                                const std::vector<ElementOperators>& ops, const Poly2& u,
                                StabilizationKind stab, double solver_tol = 1e-12,
                                bool condense = false, double stab_multiplier = 1.0,
                                int direct_threshold = 20000);

std::string rows_to_csv(const std::vector<StudyRow>& rows);
std::string rates_to_csv(const std::vector<RateSummary>& rates);
std::string h12_to_csv(const std::vector<H12Row>& rows, const std::string& first_column);

/// Writes errors.csv / rates.csv / one SVG per error quantity (or the h12
/// CSVs) under config.out_dir.
void emit_reports(const StudyResult& result, const StudyConfig& config);

} // namespace vempoly
