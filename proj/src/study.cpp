#include <vempoly/study.hpp>
#include <vempoly/h12.hpp>
#include <vempoly/svg.hpp>

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace vempoly {

StudyKind parse_study_kind(const std::string& name)
{
  if (name == "test1_quads") return StudyKind::Test1Quads;
  if (name == "test1_voronoi") return StudyKind::Test1Voronoi;
  if (name == "test2_voronoi") return StudyKind::Test2Voronoi;
  if (name == "test3_agglomerate") return StudyKind::Test3Agglomerate;
  if (name == "h12") return StudyKind::H12;
  if (name == "single") return StudyKind::SingleSolve;
  throw std::invalid_argument("unknown study '" + name + "'");
}

std::string study_kind_name(StudyKind kind)
{
  switch (kind) {
    case StudyKind::Test1Quads: return "test1_quads";
    case StudyKind::Test1Voronoi: return "test1_voronoi";
    case StudyKind::Test2Voronoi: return "test2_voronoi";
    case StudyKind::Test3Agglomerate: return "test3_agglomerate";
    case StudyKind::H12: return "h12";
    case StudyKind::SingleSolve: return "single";
  }
  return "?";
}

namespace {

std::vector<Orders> default_orders(StudyKind kind)
{
  switch (kind) {
    case StudyKind::Test1Quads:
      return {{1, 1}, {2, 1}, {2, 2}, {3, 1}, {3, 2}, {3, 3}};
    case StudyKind::Test1Voronoi:
      return {{1, 1}, {2, 2}, {3, 1}};
    case StudyKind::Test2Voronoi:
      return {{1, 1}, {2, 1}, {2, 2}, {3, 2}};
    case StudyKind::Test3Agglomerate:
      return {{1, 1}, {2, 1}, {3, 1}, {2, 2}, {3, 2}, {4, 2}};
    default:
      return {{1, 1}};
  }
}

} // namespace

StudyConfig study_config_from_json_string(const std::string& text)
{
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& err) {
    throw std::runtime_error(std::string("study config parse error: ") + err.what());
  }
  StudyConfig cfg;
  if (j.contains("study")) cfg.kind = parse_study_kind(j["study"].get<std::string>());
  cfg.orders = default_orders(cfg.kind);
  if (j.contains("orders")) {
    cfg.orders.clear();
    for (const auto& pair : j["orders"])
      cfg.orders.emplace_back(pair.at(0).get<int>(), pair.at(1).get<int>());
  }
  if (j.contains("stabs")) {
    cfg.stabs.clear();
    for (const auto& s : j["stabs"]) cfg.stabs.push_back(parse_stabilization(s.get<std::string>()));
  }
  auto get_ints = [&](const char* key, std::vector<int>& out) {
    if (j.contains(key)) out = j[key].get<std::vector<int>>();
  };
  get_ints("quad_n", cfg.quad_n);
  get_ints("edge_split_list", cfg.edge_split_list);
  get_ints("voronoi_seeds_list", cfg.voronoi_seeds_list);
  get_ints("agglomerate_seeds", cfg.agglomerate_seeds);
  get_ints("h12_n", cfg.h12_n);
  if (j.contains("pqu_ratios")) cfg.pqu_ratios = j["pqu_ratios"].get<std::vector<double>>();
  if (j.contains("edge_split")) cfg.edge_split = j["edge_split"].get<int>();
  if (j.contains("voronoi_seeds")) cfg.voronoi_seeds = j["voronoi_seeds"].get<int>();
  if (j.contains("fine_n")) cfg.fine_n = j["fine_n"].get<int>();
  if (j.contains("rng_seed")) cfg.rng_seed = j["rng_seed"].get<std::uint64_t>();
  if (j.contains("lloyd_iters")) cfg.lloyd_iters = j["lloyd_iters"].get<int>();
  if (j.contains("solver_tol")) cfg.solver_tol = j["solver_tol"].get<double>();
  if (j.contains("stab_multiplier")) cfg.stab_multiplier = j["stab_multiplier"].get<double>();
  if (j.contains("direct_threshold")) cfg.direct_threshold = j["direct_threshold"].get<int>();
  if (j.contains("condense")) cfg.condense = j["condense"].get<bool>();
  if (j.contains("out")) cfg.out_dir = j["out"].get<std::string>();
  if (j.contains("mesh")) cfg.mesh_path = j["mesh"].get<std::string>();
  return cfg;
}

StudyConfig study_config_from_json_file(const std::string& path)
{
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open study config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return study_config_from_json_string(ss.str());
}

//------------------------------------------------------------------------------
// Patch test
//------------------------------------------------------------------------------

double patch_test_max_dof_error(const PolyMesh& mesh, const MeshTopology& topo,
                                const DofLayout& layout,
                                const std::vector<ElementOperators>& ops, const Poly2& u,
                                StabilizationKind stab, double solver_tol, bool condense,
                                double stab_multiplier, int direct_threshold)
{
  (void)topo;
  Solution sol = u.as_solution();
  SolveOptions opt;
  opt.stab = stab;
  opt.tol = solver_tol;
  opt.condense = condense;
  opt.stab_multiplier = stab_multiplier;
  opt.direct_threshold = direct_threshold;
  SolveResult res = solve_poisson(mesh, layout, ops, sol.f, sol.u, opt);
  Eigen::VectorXd ui = global_interpolant(mesh, layout, ops, sol.u);
  return (res.u - ui).lpNorm<Eigen::Infinity>();
}

//------------------------------------------------------------------------------
// Study execution
//------------------------------------------------------------------------------

namespace {

struct MeshCase {
  std::string family;
  PolyMesh mesh;
};

std::vector<MeshCase> build_meshes(const StudyConfig& cfg)
{
  std::vector<MeshCase> cases;
  switch (cfg.kind) {
    case StudyKind::Test1Quads:
      for (int n : cfg.quad_n) {
        PolyMesh quads = generate_quad_mesh(n);
        double h = std::sqrt(2.0) / n;
        cases.push_back({"quads", subdivide_edges(quads, h / cfg.edge_split)});
      }
      break;
    case StudyKind::Test1Voronoi: {
      PolyMesh base = generate_voronoi_mesh(cfg.voronoi_seeds, cfg.lloyd_iters, cfg.rng_seed);
      double hb0 = compute_metrics(base).h_bnd;
      for (int split : cfg.edge_split_list)
        cases.push_back({"voronoi-edges", subdivide_edges(base, hb0 / split)});
      break;
    }
    case StudyKind::Test2Voronoi:
      for (int seeds : cfg.voronoi_seeds_list)
        cases.push_back({"voronoi", generate_voronoi_mesh(seeds, cfg.lloyd_iters, cfg.rng_seed)});
      break;
    case StudyKind::Test3Agglomerate: {
      PolyMesh fine = generate_quad_mesh(cfg.fine_n);
      for (int seeds : cfg.agglomerate_seeds)
        cases.push_back({"agglomerate", agglomerate(fine, seeds, cfg.rng_seed)});
      break;
    }
    case StudyKind::SingleSolve: {
      if (cfg.mesh_path.empty()) throw std::runtime_error("single solve requires a mesh path");
      cases.push_back({"custom", load_mesh(cfg.mesh_path)});
      break;
    }
    case StudyKind::H12:
      break;
  }
  for (const auto& c : cases) validate_mesh(c.mesh);
  return cases;
}

StudyResult run_h12_study(const StudyConfig& cfg)
{
  StudyResult result;
  for (int n : cfg.h12_n) {
    PiecewisePoly1D psi = psi_example(n);
    double semi = h12_seminorm_sq(psi);
    double sum = 0.0;
    for (int e = 0; e < psi.grid.n_elements(); ++e) {
      double m = psi.element_linf(e);
      sum += m * m;
    }
    double bound = std::log(1.0 + psi.grid.length_ratio()) * sum;
    result.h12_rows.push_back({n, semi, bound, semi / bound});
  }
  // PQU sweep: a step across the junction of a fine run (max(4, R) unit
  // elements) and one coarse element of length R. The step picks up the
  // log-of-grading interaction, so its ratio tracks the lemma's constant.
  for (double R : cfg.pqu_ratios) {
    int n_fine = std::max(4, static_cast<int>(std::lround(R)));
    std::vector<double> lengths(n_fine, 1.0);
    lengths.push_back(R);
    Grid1D grid = Grid1D::from_lengths(0.0, lengths);
    Eigen::VectorXd values = Eigen::VectorXd::Zero(grid.breakpoints.size());
    values[n_fine] = values[n_fine + 1] = 1.0;
    PiecewisePoly1D step = PiecewisePoly1D::from_node_values(grid, values);
    double semi = h12_seminorm_sq(step);
    double sum = 0.0;
    for (int e = 0; e < grid.n_elements(); ++e) {
      double m = step.element_linf(e);
      sum += m * m;
    }
    double bound = std::log(1.0 + grid.length_ratio()) * sum;
    result.h12_pqu_rows.push_back({static_cast<int>(R), semi, bound, semi / bound});
  }
  return result;
}

} // namespace

StudyResult run_study(const StudyConfig& config)
{
  StudyConfig cfg = config;
  if (cfg.orders.empty()) cfg.orders = default_orders(cfg.kind);
  if (cfg.stabs.empty()) cfg.stabs = {StabilizationKind::DofiDofi};
  if (cfg.kind == StudyKind::H12) return run_h12_study(cfg);

  StudyResult result;
  std::vector<MeshCase> cases = build_meshes(cfg);
  Solution exact = benchmark_solution();

  bool patch_checked = false;
  for (size_t mi = 0; mi < cases.size(); ++mi) {
    const PolyMesh& mesh = cases[mi].mesh;
    MeshTopology topo = build_topology(mesh);
    MeshMetrics metrics = compute_metrics(mesh);
    for (const Orders& orders : cfg.orders) {
      DofLayout layout = build_dof_layout(mesh, topo, orders);
      std::vector<ElementOperators> ops = build_element_operators(mesh, orders);

      if (!patch_checked) {
        // Fail fast: the scheme must reproduce a degree-k_b polynomial on the
        // first mesh before any rates are reported.
        Poly2 probe = Poly2::pseudo_random(orders.kb, 7u);
        for (StabilizationKind stab : cfg.stabs) {
          double err = patch_test_max_dof_error(mesh, topo, layout, ops, probe, stab,
                                                cfg.solver_tol, cfg.condense,
                                                cfg.stab_multiplier, cfg.direct_threshold);
          if (!(err <= 1e-8))
            throw std::runtime_error("patch test failed on first mesh (" +
                                     stabilization_name(stab) + "): max DoF error " +
                                     std::to_string(err));
        }
        patch_checked = true;
      }

      for (StabilizationKind stab : cfg.stabs) {
        SolveOptions opt;
        opt.stab = stab;
        opt.tol = cfg.solver_tol;
        opt.condense = cfg.condense;
        opt.stab_multiplier = cfg.stab_multiplier;
        opt.direct_threshold = cfg.direct_threshold;
        SolveResult solved = solve_poisson(mesh, layout, ops, exact.f, exact.u, opt);
        ErrorReport report = compute_errors(mesh, topo, layout, ops, solved.u, exact);
        StudyRow row;
        row.family = cases[mi].family;
        row.ko = orders.ko;
        row.kb = orders.kb;
        row.stab = stabilization_name(stab);
        row.h = metrics.h;
        row.h_bnd = metrics.h_bnd;
        row.H_ratio = metrics.H_ratio;
        row.ell_max = metrics.max_edges;
        row.ndof = layout.n_global;
        row.err_bulk = report.err_bulk;
        row.err_trace = report.err_trace;
        result.rows.push_back(row);
      }
    }
  }

  // Rate fits per (order, stab) series with at least 3 meshes; x is h for
  // diameter refinement and h_bnd for edge refinement.
  bool use_hbnd = cfg.kind == StudyKind::Test1Voronoi;
  std::map<std::tuple<int, int, std::string>, std::vector<StudyRow>> series;
  for (const auto& row : result.rows) series[{row.ko, row.kb, row.stab}].push_back(row);
  for (const auto& [key, rows] : series) {
    if (rows.size() < 3) continue;
    for (const char* quantity : {"err_bulk", "err_trace"}) {
      std::vector<std::pair<double, double>> pts;
      for (const auto& row : rows) {
        double err = std::string(quantity) == "err_bulk" ? row.err_bulk : row.err_trace;
        if (err > 0.0) pts.emplace_back(use_hbnd ? row.h_bnd : row.h, err);
      }
      if (pts.size() < 3) continue;
      RateFit fit = fit_rate(pts);
      result.rates.push_back({rows.front().family, std::get<0>(key), std::get<1>(key),
                              std::get<2>(key), quantity, fit.slope, fit.residual});
    }
  }
  return result;
}

//------------------------------------------------------------------------------
// Report emission
//------------------------------------------------------------------------------

std::string rows_to_csv(const std::vector<StudyRow>& rows)
{
  std::ostringstream os;
  os << "family,ko,kb,stab,h,h_bnd,H_ratio,ell_max,ndof,err_bulk,err_trace\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%s,%d,%d,%s,%.8e,%.8e,%.8e,%d,%d,%.8e,%.8e\n",
                  r.family.c_str(), r.ko, r.kb, r.stab.c_str(), r.h, r.h_bnd, r.H_ratio,
                  r.ell_max, r.ndof, r.err_bulk, r.err_trace);
    os << buf;
  }
  return os.str();
}

std::string rates_to_csv(const std::vector<RateSummary>& rates)
{
  std::ostringstream os;
  os << "family,ko,kb,stab,quantity,slope,residual\n";
  char buf[192];
  for (const auto& r : rates) {
    std::snprintf(buf, sizeof buf, "%s,%d,%d,%s,%s,%.4f,%.4e\n", r.family.c_str(), r.ko, r.kb,
                  r.stab.c_str(), r.quantity.c_str(), r.slope, r.residual);
    os << buf;
  }
  return os.str();
}

std::string h12_to_csv(const std::vector<H12Row>& rows, const std::string& first_column)
{
  std::ostringstream os;
  os << first_column << ",seminorm,bound,ratio\n";
  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%d,%.8e,%.8e,%.8e\n", r.n, r.seminorm_sq, r.bound, r.ratio);
    os << buf;
  }
  return os.str();
}

namespace {

void write_file(const std::string& path, const std::string& content)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << content;
}

} // namespace

void emit_reports(const StudyResult& result, const StudyConfig& config)
{
  namespace fs = std::filesystem;
  fs::create_directories(config.out_dir);
  std::string prefix = config.out_dir + "/" + study_kind_name(config.kind);

  if (config.kind == StudyKind::H12) {
    write_file(prefix + "_psi.csv", h12_to_csv(result.h12_rows, "N"));
    write_file(prefix + "_pqu.csv", h12_to_csv(result.h12_pqu_rows, "R"));
    return;
  }

  write_file(prefix + "_errors.csv", rows_to_csv(result.rows));
  write_file(prefix + "_rates.csv", rates_to_csv(result.rates));

  bool use_hbnd = config.kind == StudyKind::Test1Voronoi;
  for (const char* quantity : {"err_bulk", "err_trace"}) {
    std::map<std::tuple<int, int, std::string>, SvgSeries> series;
    for (const auto& row : result.rows) {
      double err = std::string(quantity) == "err_bulk" ? row.err_bulk : row.err_trace;
      if (!(err > 0.0)) continue;
      auto key = std::make_tuple(row.ko, row.kb, row.stab);
      auto& s = series[key];
      if (s.label.empty())
        s.label = "k=(" + std::to_string(row.ko) + "," + std::to_string(row.kb) + ") " + row.stab;
      s.points.emplace_back(use_hbnd ? row.h_bnd : row.h, err);
    }
    std::vector<SvgSeries> list;
    for (auto& [key, s] : series) {
      for (const auto& rate : result.rates)
        if (rate.ko == std::get<0>(key) && rate.kb == std::get<1>(key) &&
            rate.stab == std::get<2>(key) && rate.quantity == quantity)
          s.slope = rate.slope;
      s.annotate_slope = s.points.size() >= 3;
      list.push_back(s);
    }
    std::string title = study_kind_name(config.kind) + std::string(" ") + quantity;
    write_file(prefix + "_" + quantity + ".svg",
               render_loglog_svg(list, title, use_hbnd ? "h_bnd" : "h", quantity));
  }
}

} // namespace vempoly
