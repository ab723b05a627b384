// Command-line driver: mesh generation, single solves, convergence studies
// and the 1D fractional-seminorm study.

#include <vempoly/errors.hpp>
#include <vempoly/h12.hpp>
#include <vempoly/manufactured.hpp>
#include <vempoly/mesh.hpp>
#include <vempoly/solve.hpp>
#include <vempoly/study.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

using namespace vempoly;

namespace {

void print_row_header()
{
  std::printf("family,ko,kb,stab,h,h_bnd,H_ratio,ell_max,ndof,err_bulk,err_trace\n");
}

void print_row(const StudyRow& r)
{
  std::printf("%s,%d,%d,%s,%.8e,%.8e,%.8e,%d,%d,%.8e,%.8e\n", r.family.c_str(), r.ko, r.kb,
              r.stab.c_str(), r.h, r.h_bnd, r.H_ratio, r.ell_max, r.ndof, r.err_bulk,
              r.err_trace);
}

int run_solve(const std::string& mesh_path, int ko, int kb, const std::string& stab_name,
              double tol, bool condense)
{
  PolyMesh mesh = load_mesh(mesh_path);
  MeshTopology topo = build_topology(mesh);
  Orders orders(ko, kb);
  DofLayout layout = build_dof_layout(mesh, topo, orders);
  std::vector<ElementOperators> ops = build_element_operators(mesh, orders);

  double min_sv = std::numeric_limits<double>::max();
  for (const auto& op : ops) min_sv = std::min(min_sv, op.dof_matrix_min_singular_value());
  if (min_sv < 1e-10)
    std::fprintf(stderr, "warning: ill-conditioned DoF evaluation matrix (min sv %.3e)\n", min_sv);
  if (!all_star_shaped_wrt_centroid(mesh))
    std::fprintf(stderr, "note: some elements are not star-shaped w.r.t. their centroid\n");

  Solution exact = benchmark_solution();
  SolveOptions opt;
  opt.stab = parse_stabilization(stab_name);
  opt.tol = tol;
  opt.condense = condense;
  SolveResult solved = solve_poisson(mesh, layout, ops, exact.f, exact.u, opt);
  ErrorReport report = compute_errors(mesh, topo, layout, ops, solved.u, exact);
  MeshMetrics metrics = compute_metrics(mesh);

  StudyRow row{"custom", ko,       kb,   stab_name,        metrics.h,       metrics.h_bnd,
               metrics.H_ratio,    metrics.max_edges,      layout.n_global, report.err_bulk,
               report.err_trace};
  print_row_header();
  print_row(row);
  std::fprintf(stderr, "solver: %s, free DoFs %d, residual %.3e\n",
               solved.stats.method.c_str(), solved.stats.free_dofs, solved.stats.residual);
  return 0;
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"vempoly: generalized virtual elements on polygonal meshes"};
  app.require_subcommand(1);

  // --- solve ---------------------------------------------------------------
  auto* solve_cmd = app.add_subcommand("solve", "solve the benchmark problem on a mesh");
  std::string mesh_path, stab_name = "dofi";
  int ko = 1, kb = 1;
  double tol = 1e-12;
  bool no_condense = false;
  solve_cmd->add_option("--mesh", mesh_path, "mesh JSON file")->required();
  solve_cmd->add_option("--ko", ko, "interior degree");
  solve_cmd->add_option("--kb", kb, "boundary degree");
  solve_cmd->add_option("--stab", stab_name, "stabilization: dofi|dofi-light|trace");
  solve_cmd->add_option("--tol", tol, "solver tolerance");
  solve_cmd->add_flag("--no-condense", no_condense, "skip static condensation");

  // --- study ---------------------------------------------------------------
  auto* study_cmd = app.add_subcommand("study", "run a convergence study");
  std::string config_path, study_name, study_stab, out_dir;
  int study_ko = 0, study_kb = 0;
  std::uint64_t seed = 0;
  bool have_seed = false;
  study_cmd->add_option("--config", config_path, "JSON study configuration");
  study_cmd->add_option("--study", study_name,
                        "test1_quads|test1_voronoi|test2_voronoi|test3_agglomerate|h12");
  study_cmd->add_option("--ko", study_ko, "restrict to one interior degree");
  study_cmd->add_option("--kb", study_kb, "restrict to one boundary degree");
  study_cmd->add_option("--stab", study_stab, "restrict to one stabilization");
  study_cmd->add_option("--seed", seed, "RNG seed")->trigger_on_parse()->each([&](const std::string&) {
    have_seed = true;
  });
  study_cmd->add_option("--out", out_dir, "output directory");

  // --- h12 -----------------------------------------------------------------
  auto* h12_cmd = app.add_subcommand("h12", "psi_N sharpness and PQU lemma-ratio study");
  std::string h12_out = ".";
  h12_cmd->add_option("--out", h12_out, "output directory");

  // --- mesh ----------------------------------------------------------------
  auto* mesh_cmd = app.add_subcommand("mesh", "mesh generation and transforms");
  mesh_cmd->require_subcommand(1);

  auto* gen_cmd = mesh_cmd->add_subcommand("gen", "generate a quad or Voronoi mesh");
  std::string family = "quad", gen_out = "mesh.json";
  int n = 4, seeds_count = 16, lloyd = 100;
  std::uint64_t gen_seed = 42;
  gen_cmd->add_option("--family", family, "quad|voronoi");
  gen_cmd->add_option("--n", n, "cells per side (quad)");
  gen_cmd->add_option("--seeds", seeds_count, "seed count (voronoi)");
  gen_cmd->add_option("--lloyd", lloyd, "Lloyd iterations (voronoi)");
  gen_cmd->add_option("--seed", gen_seed, "RNG seed");
  gen_cmd->add_option("--out", gen_out, "output path")->required();

  auto* sub_cmd = mesh_cmd->add_subcommand("subdivide", "split edges to a target length");
  std::string sub_in, sub_out;
  double target_hb = 0.1;
  sub_cmd->add_option("--in", sub_in, "input mesh")->required();
  sub_cmd->add_option("--target-hb", target_hb, "target edge length")->required();
  sub_cmd->add_option("--out", sub_out, "output path")->required();

  auto* agg_cmd = mesh_cmd->add_subcommand("agglomerate", "agglomerate a fine mesh");
  std::string agg_in, agg_out;
  int n_coarse = 16;
  std::uint64_t agg_seed = 42;
  agg_cmd->add_option("--in", agg_in, "input mesh")->required();
  agg_cmd->add_option("--n-coarse", n_coarse, "number of coarse seeds")->required();
  agg_cmd->add_option("--seed", agg_seed, "RNG seed");
  agg_cmd->add_option("--out", agg_out, "output path")->required();

  auto* info_cmd = mesh_cmd->add_subcommand("info", "print mesh metrics");
  std::string info_in;
  info_cmd->add_option("--in", info_in, "input mesh")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve_cmd->parsed())
      return run_solve(mesh_path, ko, kb, stab_name, tol, !no_condense);

    if (study_cmd->parsed()) {
      StudyConfig cfg;
      if (!config_path.empty()) cfg = study_config_from_json_file(config_path);
      if (!study_name.empty()) {
        StudyConfig fresh = study_config_from_json_string("{\"study\": \"" + study_name + "\"}");
        if (config_path.empty()) cfg = fresh;
        else cfg.kind = fresh.kind;
      }
      if (study_ko > 0 && study_kb > 0) cfg.orders = {Orders(study_ko, study_kb)};
      if (!study_stab.empty()) cfg.stabs = {parse_stabilization(study_stab)};
      if (have_seed) cfg.rng_seed = seed;
      if (!out_dir.empty()) cfg.out_dir = out_dir;

      StudyResult result = run_study(cfg);
      emit_reports(result, cfg);
      if (cfg.kind == StudyKind::H12) {
        std::printf("N,seminorm,bound,ratio\n");
        for (const auto& r : result.h12_rows)
          std::printf("%d,%.8e,%.8e,%.8e\n", r.n, r.seminorm_sq, r.bound, r.ratio);
      } else {
        print_row_header();
        for (const auto& r : result.rows) print_row(r);
        for (const auto& rate : result.rates)
          std::fprintf(stderr, "rate %s k=(%d,%d) %s %s: slope %.3f\n", rate.family.c_str(),
                       rate.ko, rate.kb, rate.stab.c_str(), rate.quantity.c_str(), rate.slope);
      }
      return 0;
    }

    if (h12_cmd->parsed()) {
      StudyConfig cfg;
      cfg.kind = StudyKind::H12;
      cfg.out_dir = h12_out;
      StudyResult result = run_study(cfg);
      emit_reports(result, cfg);
      std::printf("N,seminorm,bound,ratio\n");
      for (const auto& r : result.h12_rows)
        std::printf("%d,%.8e,%.8e,%.8e\n", r.n, r.seminorm_sq, r.bound, r.ratio);
      return 0;
    }

    if (gen_cmd->parsed()) {
      PolyMesh mesh = family == "quad" ? generate_quad_mesh(n)
                                       : generate_voronoi_mesh(seeds_count, lloyd, gen_seed);
      validate_mesh(mesh);
      save_mesh(mesh, gen_out);
      return 0;
    }
    if (sub_cmd->parsed()) {
      PolyMesh mesh = subdivide_edges(load_mesh(sub_in), target_hb);
      validate_mesh(mesh);
      save_mesh(mesh, sub_out);
      return 0;
    }
    if (agg_cmd->parsed()) {
      PolyMesh mesh = agglomerate(load_mesh(agg_in), n_coarse, agg_seed);
      validate_mesh(mesh);
      save_mesh(mesh, agg_out);
      return 0;
    }
    if (info_cmd->parsed()) {
      PolyMesh mesh = load_mesh(info_in);
      MeshMetrics m = compute_metrics(mesh);
      std::printf("elements,%d\nvertices,%d\nh,%.8e\nh_bnd,%.8e\nH_ratio,%.8e\nlog_term,%.8e\nell_max,%d\n",
                  mesh.n_elements(), mesh.n_vertices(), m.h, m.h_bnd, m.H_ratio, m.log_term,
                  m.max_edges);
      if (!all_star_shaped_wrt_centroid(mesh))
        std::fprintf(stderr, "note: some elements are not star-shaped w.r.t. their centroid\n");
      return 0;
    }
  } catch (const std::exception& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return 1;
  }
  return 0;
}
