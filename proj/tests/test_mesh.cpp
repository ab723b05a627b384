#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vempoly/mesh.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>

using namespace vempoly;

namespace {

double total_area(const PolyMesh& mesh)
{
  double a = 0.0;
  for (int e = 0; e < mesh.n_elements(); ++e)
    a += polygon_signed_area(mesh.element_polygon(e));
  return a;
}

} // namespace

TEST_CASE("quad mesh: counts and metrics")
{
  PolyMesh one = generate_quad_mesh(1);
  CHECK(one.n_elements() == 1);
  CHECK(one.n_vertices() == 4);
  CHECK(compute_metrics(one).h == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));

  PolyMesh mesh = generate_quad_mesh(4);
  CHECK(mesh.n_elements() == 16);
  CHECK(mesh.n_vertices() == 25);
  MeshMetrics m = compute_metrics(mesh);
  for (const auto& pe : m.per_element) CHECK(pe.n_edges == 4);
  CHECK(m.H_ratio == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(m.h == doctest::Approx(std::sqrt(2.0) / 4).epsilon(1e-14));
  validate_mesh(mesh);

  CHECK_THROWS_AS(generate_quad_mesh(0), MeshError);
}

TEST_CASE("metrics: single square element and 1:3 split side")
{
  PolyMesh unit = generate_quad_mesh(1);
  MeshMetrics m = compute_metrics(unit);
  CHECK(m.per_element[0].h_E == doctest::Approx(std::sqrt(2.0)));
  CHECK(m.per_element[0].h_bnd_E == doctest::Approx(1.0));
  CHECK(m.per_element[0].H_ratio_E == doctest::Approx(1.0));
  CHECK(m.per_element[0].n_edges == 4);

  // Unit square with the bottom side split 1:3: edges {1/4, 3/4, 1, 1, 1}.
  PolyMesh split;
  split.vertices = {{0, 0}, {0.25, 0}, {1, 0}, {1, 1}, {0, 1}};
  split.elements = {{0, 1, 2, 3, 4}};
  split.boundary_vertex = {true, true, true, true, true};
  MeshMetrics ms = compute_metrics(split);
  CHECK(ms.per_element[0].H_ratio_E == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(ms.log_term == doctest::Approx(std::log(5.0)).epsilon(1e-14));
}

TEST_CASE("subdivide_edges: no-op split returns the identical mesh")
{
  PolyMesh mesh = generate_quad_mesh(4);
  PolyMesh same = subdivide_edges(mesh, 0.25);
  CHECK(meshes_equivalent(mesh, same));
}

TEST_CASE("subdivide_edges: n=2 quads at target 0.25 give octagons")
{
  PolyMesh mesh = subdivide_edges(generate_quad_mesh(2), 0.25);
  validate_mesh(mesh);
  for (const auto& cyc : mesh.elements) CHECK(cyc.size() == 8);
  CHECK(total_area(mesh) == doctest::Approx(1.0).epsilon(1e-12));

  // Element point sets unchanged: diameters identical.
  MeshMetrics before = compute_metrics(generate_quad_mesh(2));
  MeshMetrics after = compute_metrics(mesh);
  for (int e = 0; e < 4; ++e)
    CHECK(after.per_element[e].h_E == doctest::Approx(before.per_element[e].h_E).epsilon(1e-14));
  CHECK(after.h_bnd <= 0.25 + 1e-12);
}

TEST_CASE("subdivide_edges is idempotent at the same target")
{
  PolyMesh once = subdivide_edges(generate_quad_mesh(3), 0.07);
  PolyMesh twice = subdivide_edges(once, 0.07);
  CHECK(meshes_equivalent(once, twice));
}

TEST_CASE("voronoi: single seed is the unit square")
{
  PolyMesh mesh = generate_voronoi_mesh(1, 0, 7);
  CHECK(mesh.n_elements() == 1);
  CHECK(mesh.n_vertices() == 4);
  CHECK(total_area(mesh) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("voronoi: 16 relaxed seeds partition the square")
{
  PolyMesh mesh = generate_voronoi_mesh(16, 100, 42);
  validate_mesh(mesh);
  CHECK(mesh.n_elements() == 16);
  CHECK(total_area(mesh) == doctest::Approx(1.0).epsilon(1e-10));
  MeshMetrics m = compute_metrics(mesh);
  for (const auto& pe : m.per_element) {
    CHECK(pe.n_edges >= 3);
    CHECK(pe.n_edges <= 15);
  }

  // Deterministic for a fixed seed.
  PolyMesh again = generate_voronoi_mesh(16, 100, 42);
  CHECK(meshes_equivalent(mesh, again, 0.0));
  PolyMesh other = generate_voronoi_mesh(16, 100, 43);
  CHECK(!meshes_equivalent(mesh, other));
}

TEST_CASE("agglomerate: identity seeding returns the fine mesh")
{
  PolyMesh fine = generate_quad_mesh(4);
  std::vector<Eigen::Vector2d> seeds;
  for (int e = 0; e < fine.n_elements(); ++e)
    seeds.push_back(polygon_centroid(fine.element_polygon(e)));
  PolyMesh out = agglomerate_with_seeds(fine, seeds);
  CHECK(meshes_equivalent(fine, out));
}

TEST_CASE("agglomerate: 32x32 quads into 16 coarse polygons")
{
  PolyMesh fine = generate_quad_mesh(32);
  PolyMesh coarse = agglomerate(fine, 16, 42);
  validate_mesh(coarse);
  CHECK(coarse.n_elements() == 16);
  CHECK(total_area(coarse) == doctest::Approx(1.0).epsilon(1e-10));
  double mean_edges = 0.0;
  for (const auto& cyc : coarse.elements) mean_edges += static_cast<double>(cyc.size());
  mean_edges /= coarse.n_elements();
  CHECK(mean_edges >= 20.0);
}

TEST_CASE("mesh JSON: round trip and invariant errors")
{
  namespace fs = std::filesystem;
  PolyMesh mesh = generate_quad_mesh(2);
  std::string path = (fs::temp_directory_path() / "vempoly_mesh_roundtrip.json").string();
  save_mesh(mesh, path);
  PolyMesh loaded = load_mesh(path);
  CHECK(meshes_equivalent(mesh, loaded, 0.0));
  fs::remove(path);

  // Clockwise element -> orientation error.
  CHECK_THROWS_WITH_AS(
      mesh_from_json_string(R"({"vertices": [[0,0],[1,0],[1,1],[0,1]],
                                "elements": [[0,3,2,1]],
                                "boundary": [1,1,1,1]})"),
      doctest::Contains("counterclockwise"), MeshError);

  // Duplicated element -> cover check failure (area sum != 1).
  CHECK_THROWS_WITH_AS(
      mesh_from_json_string(R"({"vertices": [[0,0],[1,0],[1,1],[0,1]],
                                "elements": [[0,1,2,3],[0,1,2,3]],
                                "boundary": [1,1,1,1]})"),
      doctest::Contains("cover"), MeshError);

  CHECK_THROWS_WITH_AS(mesh_from_json_string("{\"vertices\": ["),
                       doctest::Contains("parse error"), MeshError);
  CHECK_THROWS_WITH_AS(mesh_from_json_string("{\"vertices\": []}"),
                       doctest::Contains("elements"), MeshError);
}

TEST_CASE("partition property holds after every generator and transform")
{
  CHECK(total_area(generate_quad_mesh(5)) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(total_area(generate_voronoi_mesh(25, 40, 3)) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(total_area(subdivide_edges(generate_voronoi_mesh(25, 40, 3), 0.05)) ==
        doctest::Approx(1.0).epsilon(1e-10));
  CHECK(total_area(agglomerate(generate_quad_mesh(16), 10, 5)) ==
        doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("star-shapedness diagnostic accepts the convex generators")
{
  CHECK(all_star_shaped_wrt_centroid(generate_quad_mesh(3)));
  CHECK(all_star_shaped_wrt_centroid(generate_voronoi_mesh(9, 50, 1)));
}
