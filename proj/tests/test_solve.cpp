#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vempoly/manufactured.hpp>
#include <vempoly/mesh.hpp>
#include <vempoly/solve.hpp>
#include <vempoly/study.hpp>

#include <algorithm>
#include <cmath>
#include <random>

using namespace vempoly;

namespace {

struct Problem {
  PolyMesh mesh;
  MeshTopology topo;
  DofLayout layout;
  std::vector<ElementOperators> ops;

  Problem(PolyMesh m, Orders orders)
    : mesh(std::move(m)),
      topo(build_topology(mesh)),
      layout(build_dof_layout(mesh, topo, orders)),
      ops(build_element_operators(mesh, orders))
  {
  }
};

} // namespace

TEST_CASE("single all-Dirichlet element: solution equals boundary data")
{
  Problem p(generate_quad_mesh(1), Orders(1, 1));
  auto g = [](const Eigen::Vector2d& x) { return 1.0 + 2.0 * x.x() - x.y(); };
  SolveOptions opt;
  SolveResult res = solve_poisson(p.mesh, p.layout, p.ops,
                                  [](const Eigen::Vector2d&) { return 0.0; }, g, opt);
  CHECK(res.stats.free_dofs == 0);
  for (int v = 0; v < p.mesh.n_vertices(); ++v)
    CHECK(res.u[v] == doctest::Approx(g(p.mesh.vertices[v])).epsilon(1e-14));
}

TEST_CASE("2x2 quads at k=(1,1): the 1x1 interior system matches hand assembly")
{
  Problem p(generate_quad_mesh(2), Orders(1, 1));
  AssembledSystem sys = assemble(p.mesh, p.layout, p.ops, StabilizationKind::DofiDofi,
                                 [](const Eigen::Vector2d&) { return 1.0; });
  ReducedSystem red = apply_dirichlet(sys, p.layout, [](const Eigen::Vector2d&) { return 0.0; });
  REQUIRE(red.free_index.size() == 1); // only the center vertex is free

  int center = red.free_index[0];
  double diag = 0.0;
  for (int e = 0; e < 4; ++e) {
    Eigen::MatrixXd K = element_stiffness(p.ops[e], StabilizationKind::DofiDofi);
    const auto& dofs = p.layout.element_dofs[e];
    for (size_t i = 0; i < dofs.size(); ++i)
      if (dofs[i] == center) diag += K(i, i);
  }
  CHECK(red.A.coeff(0, 0) == doctest::Approx(diag).epsilon(1e-14));
}

TEST_CASE("assembled matrix is symmetric on a Voronoi mesh")
{
  Problem p(generate_voronoi_mesh(12, 50, 9), Orders(2, 1));
  AssembledSystem sys =
      assemble(p.mesh, p.layout, p.ops, StabilizationKind::Trace, benchmark_solution().f);
  Eigen::SparseMatrix<double> diff = sys.A - Eigen::SparseMatrix<double>(sys.A.transpose());
  double worst = 0.0;
  for (int k = 0; k < diff.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(diff, k); it; ++it)
      worst = std::max(worst, std::abs(it.value()));
  CHECK(worst < 1e-12);
}

TEST_CASE("patch test: linear solution is exact at k=(1,1) on quads")
{
  Problem p(generate_quad_mesh(3), Orders(1, 1));
  Poly2 u({{1.0, 1, 0}, {1.0, 0, 1}}); // x + y
  double err =
      patch_test_max_dof_error(p.mesh, p.topo, p.layout, p.ops, u, StabilizationKind::DofiDofi);
  CHECK(err < 1e-10);
}

TEST_CASE("patch test: harmonic xy at k=(2,2) on a Voronoi mesh")
{
  Problem p(generate_voronoi_mesh(16, 80, 42), Orders(2, 2));
  Poly2 u({{1.0, 1, 1}}); // xy
  double err =
      patch_test_max_dof_error(p.mesh, p.topo, p.layout, p.ops, u, StabilizationKind::DofiDofi);
  CHECK(err < 1e-9);
}

TEST_CASE("patch test sweep: families, stabilizations, order pairs")
{
  std::vector<PolyMesh> meshes;
  meshes.push_back(generate_quad_mesh(3));
  meshes.push_back(generate_voronoi_mesh(9, 60, 4));
  meshes.push_back(agglomerate(generate_quad_mesh(8), 6, 11));
  int checked = 0;
  for (const auto& mesh : meshes) {
    MeshTopology topo = build_topology(mesh);
    for (int kb = 1; kb <= 3; ++kb)
      for (int ko = kb; ko <= kb + 1; ++ko) {
        Orders orders(ko, kb);
        DofLayout layout = build_dof_layout(mesh, topo, orders);
        auto ops = build_element_operators(mesh, orders);
        Poly2 u = Poly2::pseudo_random(kb, 100 + checked);
        for (auto stab : {StabilizationKind::DofiDofi, StabilizationKind::Trace}) {
          double err = patch_test_max_dof_error(mesh, topo, layout, ops, u, stab);
          CHECK(err < 1e-9);
          ++checked;
        }
      }
  }
  CHECK(checked == 3 * 3 * 2 * 2);
}

TEST_CASE("condensation: k=(1,1) has no interior block")
{
  ElementOperators op(Polygon{{0, 0}, {1, 0}, {1, 1}, {0, 1}}, Orders(1, 1));
  Eigen::MatrixXd K = element_stiffness(op, StabilizationKind::DofiDofi);
  Eigen::VectorXd b = Eigen::VectorXd::Random(4);
  ElementCondensation c = condense_element(K, b, 4);
  CHECK((c.K_hat - K).cwiseAbs().maxCoeff() == 0.0);
  CHECK(c.rec_rhs.size() == 0);
}

TEST_CASE("condensation: Schur energy equals the interior minimum")
{
  std::mt19937_64 rng(3);
  std::normal_distribution<double> dist;
  ElementOperators op(Polygon{{0, 0}, {1, 0}, {1.2, 0.9}, {0.4, 1.3}}, Orders(3, 1));
  Eigen::MatrixXd K = element_stiffness(op, StabilizationKind::DofiDofi);
  int nb = op.n_dofs() - op.n_moments();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(op.n_dofs());
  ElementCondensation c = condense_element(K, b, nb);
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::VectorXd xb(nb);
    for (int i = 0; i < nb; ++i) xb[i] = dist(rng);
    Eigen::VectorXd xi = c.rec_rhs - c.rec_mat * xb;
    Eigen::VectorXd full(op.n_dofs());
    full << xb, xi;
    double schur = xb.transpose() * c.K_hat * xb;
    double direct = full.transpose() * K * full;
    CHECK(schur == doctest::Approx(direct).epsilon(1e-11));
    // Any other interior state has larger energy.
    Eigen::VectorXd xi2 = xi;
    xi2[0] += 0.1;
    Eigen::VectorXd full2(op.n_dofs());
    full2 << xb, xi2;
    CHECK(double(full2.transpose() * K * full2) >= direct - 1e-12);
  }
}

TEST_CASE("condensed and plain solves agree, k=(2,1)")
{
  Problem p(generate_voronoi_mesh(10, 50, 21), Orders(2, 1));
  Solution sol = benchmark_solution();
  SolveOptions plain;
  plain.condense = false;
  SolveOptions cond;
  cond.condense = true;
  SolveResult a = solve_poisson(p.mesh, p.layout, p.ops, sol.f, sol.u, plain);
  SolveResult b = solve_poisson(p.mesh, p.layout, p.ops, sol.f, sol.u, cond);
  double scale = a.u.cwiseAbs().maxCoeff();
  CHECK((a.u - b.u).cwiseAbs().maxCoeff() < 1e-9 * scale);
}

TEST_CASE("solve_spd: 1x1 system and dense-factorization oracle at 50x50")
{
  Eigen::SparseMatrix<double> one(1, 1);
  one.insert(0, 0) = 4.0;
  Eigen::VectorXd rhs1(1);
  rhs1 << 2.0;
  CHECK(solve_spd(one, rhs1, 1e-12)[0] == doctest::Approx(0.5));

  std::mt19937_64 rng(33);
  std::normal_distribution<double> dist;
  Eigen::MatrixXd M(50, 50);
  for (int i = 0; i < 50; ++i)
    for (int j = 0; j < 50; ++j) M(i, j) = dist(rng);
  Eigen::MatrixXd Ad = M.transpose() * M + 50.0 * Eigen::MatrixXd::Identity(50, 50);
  Eigen::VectorXd b(50);
  for (int i = 0; i < 50; ++i) b[i] = dist(rng);
  Eigen::SparseMatrix<double> As = Ad.sparseView();
  Eigen::VectorXd x = solve_spd(As, b, 1e-12);
  Eigen::VectorXd oracle = Eigen::LDLT<Eigen::MatrixXd>(Ad).solve(b);
  CHECK((x - oracle).norm() / oracle.norm() < 1e-10);
}

TEST_CASE("PCG and direct paths agree on an assembled system")
{
  Problem p(generate_quad_mesh(8), Orders(2, 2));
  Solution sol = benchmark_solution();
  AssembledSystem sys = assemble(p.mesh, p.layout, p.ops, StabilizationKind::DofiDofi, sol.f);
  ReducedSystem red = apply_dirichlet(sys, p.layout, sol.u);
  SolveStats st_direct, st_pcg;
  Eigen::VectorXd xd = solve_spd(red.A, red.b, 1e-13, &st_direct);
  Eigen::VectorXd xc = solve_spd(red.A, red.b, 1e-13, &st_pcg, /*direct_threshold=*/0);
  CHECK(st_direct.method == "direct");
  CHECK(st_pcg.method == "pcg");
  CHECK(st_pcg.residual <= 1e-12);
  CHECK(!st_pcg.residual_history.empty());
  CHECK((xd - xc).norm() / xd.norm() < 1e-9);
}

TEST_CASE("solution is invariant under element reordering")
{
  PolyMesh mesh = generate_voronoi_mesh(14, 60, 77);
  PolyMesh reversed = mesh;
  std::reverse(reversed.elements.begin(), reversed.elements.end());

  Solution sol = benchmark_solution();
  SolveOptions opt;
  auto run = [&](const PolyMesh& m) {
    MeshTopology topo = build_topology(m);
    DofLayout layout = build_dof_layout(m, topo, Orders(2, 1));
    auto ops = build_element_operators(m, Orders(2, 1));
    return solve_poisson(m, layout, ops, sol.f, sol.u, opt).u;
  };
  Eigen::VectorXd ua = run(mesh);
  Eigen::VectorXd ub = run(reversed);
  // Vertex DoFs occupy the same slots in both layouts.
  double scale = ua.cwiseAbs().maxCoeff();
  for (int v = 0; v < mesh.n_vertices(); ++v)
    CHECK(std::abs(ua[v] - ub[v]) < 1e-9 * scale);
}

TEST_CASE("element failures are reported with the element index")
{
  PolyMesh mesh = generate_quad_mesh(2);
  mesh.elements[2] = {0, 1, 2}; // three collinear bottom-row vertices
  CHECK_THROWS_WITH_AS(build_element_operators(mesh, Orders(1, 1)),
                       doctest::Contains("element 2"), std::runtime_error);
}
