#pragma once

#include <vempoly/polygon.hpp>

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace vempoly {

/// Polygonal mesh of the unit square. Elements are CCW vertex cycles;
/// collinear consecutive vertices are legal and kept (edge subdivision and
/// agglomeration produce them on purpose).
struct PolyMesh {
  std::vector<Eigen::Vector2d> vertices;
  std::vector<std::vector<int>> elements;
  std::vector<bool> boundary_vertex;

  int n_vertices() const { return static_cast<int>(vertices.size()); }
  int n_elements() const { return static_cast<int>(elements.size()); }
  Polygon element_polygon(int e) const;
};

/// Unique-edge connectivity derived from the element cycles. Edge order is
/// discovery order over (element, local edge), so it is deterministic.
struct MeshTopology {
  struct Edge {
    int a, b;          // vertex indices, a < b
    int elem[2];       // incident elements, -1 if none
    int n_incident;
  };
  std::vector<Edge> edges;
  // per element, per local edge (v_i -> v_{i+1}): global edge index
  std::vector<std::vector<int>> element_edges;

  int n_edges() const { return static_cast<int>(edges.size()); }
  bool is_boundary_edge(int e) const { return edges[e].n_incident == 1; }
};

MeshTopology build_topology(const PolyMesh& mesh);

/// Per-element and global mesh size quantities: diameter h_E, largest edge
/// h_bnd_E, largest/smallest edge ratio H_E, edge count; the global values are
/// the maxima, and log_term = log(1 + H) tracks the dofi-dofi coercivity loss.
struct MeshMetrics {
  struct PerElement {
    double h_E;
    double h_bnd_E;
    double H_ratio_E;
    int n_edges;
  };
  std::vector<PerElement> per_element;
  double h = 0.0;
  double h_bnd = 0.0;
  double H_ratio = 0.0;
  double log_term = 0.0;
  int max_edges = 0;
};

MeshMetrics compute_metrics(const PolyMesh& mesh);

struct MeshError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Checks the PolyMesh invariants: CCW simple elements, unit-square cover
/// (total area 1 within 1e-10), interior edges shared by exactly 2 elements,
/// boundary edges by 1 and lying on the square boundary with flagged
/// endpoints. Throws MeshError naming the violated invariant.
void validate_mesh(const PolyMesh& mesh);

/// Warning-only diagnostic: false if some element is not star-shaped with
/// respect to its centroid (agglomerates typically are not; that is fine).
bool all_star_shaped_wrt_centroid(const PolyMesh& mesh);

//------------------------------------------------------------------------------
// Generators and transforms (all deterministic for a fixed rng_seed)
//------------------------------------------------------------------------------

/// n x n axis-aligned squares covering [0,1]^2.
PolyMesh generate_quad_mesh(int n);

/// Splits every edge of length L into ceil(L / target_hb) equal parts. The
/// element point sets are unchanged; both incident elements gain the new
/// vertices, so the mesh stays conforming.
PolyMesh subdivide_edges(const PolyMesh& mesh, double target_hb);

/// Clipped Voronoi diagram of Lloyd-relaxed seeds in the unit square.
PolyMesh generate_voronoi_mesh(int n_seeds, int lloyd_iters, std::uint64_t rng_seed);

/// Nearest-seed agglomeration of a fine mesh: every connected group of fine
/// elements becomes one polygon whose boundary keeps all fine vertices.
/// Seeds are Lloyd-relaxed random points.
PolyMesh agglomerate(const PolyMesh& fine, int n_coarse_seeds, std::uint64_t rng_seed);

/// Same with caller-provided seed points (identity agglomeration when the
/// seeds are the fine element centroids).
PolyMesh agglomerate_with_seeds(const PolyMesh& fine, const std::vector<Eigen::Vector2d>& seeds);

//------------------------------------------------------------------------------
// JSON I/O
//------------------------------------------------------------------------------

PolyMesh load_mesh(const std::string& path);
void save_mesh(const PolyMesh& mesh, const std::string& path);
PolyMesh mesh_from_json_string(const std::string& text);
std::string mesh_to_json_string(const PolyMesh& mesh);

/// True if the meshes have the same vertices (same order, within tol) and the
/// same element cycles up to rotation.
bool meshes_equivalent(const PolyMesh& a, const PolyMesh& b, double tol = 1e-12);

} // namespace vempoly
