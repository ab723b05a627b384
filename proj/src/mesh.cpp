#include <vempoly/mesh.hpp>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <queue>
#include <random>
#include <sstream>

namespace vempoly {

namespace {
constexpr double kGeomTol = 1e-9;

bool on_unit_square_boundary(const Eigen::Vector2d& p)
{
  return std::abs(p.x()) < kGeomTol || std::abs(p.x() - 1.0) < kGeomTol ||
         std::abs(p.y()) < kGeomTol || std::abs(p.y() - 1.0) < kGeomTol;
}

double rng_unit(std::mt19937_64& rng)
{
  // Explicit 53-bit mantissa draw: identical across standard libraries.
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}
} // namespace

Polygon PolyMesh::element_polygon(int e) const
{
  Polygon p;
  p.reserve(elements[e].size());
  for (int v : elements[e]) p.push_back(vertices[v]);
  return p;
}

//------------------------------------------------------------------------------
// Topology
//------------------------------------------------------------------------------

MeshTopology build_topology(const PolyMesh& mesh)
{
  MeshTopology topo;
  topo.element_edges.resize(mesh.elements.size());
  std::map<std::pair<int, int>, int> index;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const auto& cyc = mesh.elements[e];
    size_t n = cyc.size();
    topo.element_edges[e].resize(n);
    for (size_t i = 0; i < n; ++i) {
      int a = cyc[i], b = cyc[(i + 1) % n];
      auto key = std::minmax(a, b);
      auto it = index.find(key);
      if (it == index.end()) {
        MeshTopology::Edge edge{key.first, key.second, {e, -1}, 1};
        it = index.emplace(key, topo.n_edges()).first;
        topo.edges.push_back(edge);
      } else {
        auto& edge = topo.edges[it->second];
        if (edge.n_incident < 2) edge.elem[1] = e;
        edge.n_incident++;
      }
      topo.element_edges[e][i] = it->second;
    }
  }
  return topo;
}

//------------------------------------------------------------------------------
// Metrics
//------------------------------------------------------------------------------

MeshMetrics compute_metrics(const PolyMesh& mesh)
{
  MeshMetrics m;
  m.per_element.reserve(mesh.elements.size());
  m.H_ratio = 1.0;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    Polygon p = mesh.element_polygon(e);
    double emin = std::numeric_limits<double>::max(), emax = 0.0;
    for (size_t i = 0; i < p.size(); ++i) {
      double len = (p[(i + 1) % p.size()] - p[i]).norm();
      emin = std::min(emin, len);
      emax = std::max(emax, len);
    }
    MeshMetrics::PerElement pe;
    pe.h_E = polygon_diameter(p);
    pe.h_bnd_E = emax;
    pe.H_ratio_E = emax / emin;
    pe.n_edges = static_cast<int>(p.size());
    m.per_element.push_back(pe);
    m.h = std::max(m.h, pe.h_E);
    m.h_bnd = std::max(m.h_bnd, pe.h_bnd_E);
    m.H_ratio = std::max(m.H_ratio, pe.H_ratio_E);
    m.max_edges = std::max(m.max_edges, pe.n_edges);
  }
  m.log_term = std::log(1.0 + m.H_ratio);
  return m;
}

//------------------------------------------------------------------------------
// Validation
//------------------------------------------------------------------------------

void validate_mesh(const PolyMesh& mesh)
{
  if (mesh.boundary_vertex.size() != mesh.vertices.size())
    throw MeshError("boundary flag array size does not match vertex count");

  double total_area = 0.0;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const auto& cyc = mesh.elements[e];
    if (cyc.size() < 3)
      throw MeshError("element " + std::to_string(e) + " has fewer than 3 vertices");
    for (int v : cyc)
      if (v < 0 || v >= mesh.n_vertices())
        throw MeshError("element " + std::to_string(e) + " references vertex out of range");
    for (size_t i = 0; i < cyc.size(); ++i)
      for (size_t j = i + 1; j < cyc.size(); ++j)
        if (cyc[i] == cyc[j])
          throw MeshError("element " + std::to_string(e) + " repeats a vertex (non-simple cycle)");
    double area = polygon_signed_area(mesh.element_polygon(e));
    if (area <= 0.0)
      throw MeshError("element " + std::to_string(e) +
                      " is not counterclockwise (signed area <= 0)");
    total_area += area;
  }
  if (std::abs(total_area - 1.0) > 1e-10)
    throw MeshError("element areas sum to " + std::to_string(total_area) +
                    ", mesh does not cover the unit square");

  // Edge incidence and traversal direction.
  std::map<std::pair<int, int>, std::pair<int, int>> dir_count; // (fwd, bwd)
  for (const auto& cyc : mesh.elements) {
    for (size_t i = 0; i < cyc.size(); ++i) {
      int a = cyc[i], b = cyc[(i + 1) % cyc.size()];
      auto key = std::minmax(a, b);
      auto& c = dir_count[key];
      (a < b ? c.first : c.second)++;
    }
  }
  for (const auto& [key, c] : dir_count) {
    int total = c.first + c.second;
    if (total > 2)
      throw MeshError("edge shared by more than 2 elements");
    if (total == 2 && (c.first != 1 || c.second != 1))
      throw MeshError("interior edge traversed twice in the same direction");
    if (total == 1) {
      const auto& pa = mesh.vertices[key.first];
      const auto& pb = mesh.vertices[key.second];
      bool on_side =
          (std::abs(pa.x()) < kGeomTol && std::abs(pb.x()) < kGeomTol) ||
          (std::abs(pa.x() - 1.0) < kGeomTol && std::abs(pb.x() - 1.0) < kGeomTol) ||
          (std::abs(pa.y()) < kGeomTol && std::abs(pb.y()) < kGeomTol) ||
          (std::abs(pa.y() - 1.0) < kGeomTol && std::abs(pb.y() - 1.0) < kGeomTol);
      if (!on_side)
        throw MeshError("edge with a single incident element does not lie on the domain boundary");
      if (!mesh.boundary_vertex[key.first] || !mesh.boundary_vertex[key.second])
        throw MeshError("boundary edge endpoint not flagged as boundary vertex");
    }
  }
  for (int v = 0; v < mesh.n_vertices(); ++v)
    if (mesh.boundary_vertex[v] && !on_unit_square_boundary(mesh.vertices[v]))
      throw MeshError("vertex " + std::to_string(v) +
                      " flagged as boundary but not on the unit square boundary");
}

bool all_star_shaped_wrt_centroid(const PolyMesh& mesh)
{
  for (int e = 0; e < mesh.n_elements(); ++e) {
    Polygon p = mesh.element_polygon(e);
    Eigen::Vector2d c = polygon_centroid(p);
    for (size_t i = 0; i < p.size(); ++i) {
      const auto& a = p[i];
      const auto& b = p[(i + 1) % p.size()];
      double cross = (a.x() - c.x()) * (b.y() - c.y()) - (a.y() - c.y()) * (b.x() - c.x());
      if (cross < -1e-14) return false;
    }
  }
  return true;
}

//------------------------------------------------------------------------------
// Quad mesh and edge subdivision
//------------------------------------------------------------------------------

PolyMesh generate_quad_mesh(int n)
{
  if (n < 1) throw MeshError("generate_quad_mesh: n must be >= 1");
  PolyMesh mesh;
  double step = 1.0 / n;
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      mesh.vertices.emplace_back(i * step, j * step);
  auto vid = [n](int i, int j) { return j * (n + 1) + i; };
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      mesh.elements.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)});
  mesh.boundary_vertex.resize(mesh.vertices.size());
  for (int v = 0; v < mesh.n_vertices(); ++v)
    mesh.boundary_vertex[v] = on_unit_square_boundary(mesh.vertices[v]);
  return mesh;
}

PolyMesh subdivide_edges(const PolyMesh& mesh, double target_hb)
{
  if (!(target_hb > 0.0)) throw MeshError("subdivide_edges: target edge length must be > 0");
  MeshTopology topo = build_topology(mesh);

  PolyMesh out;
  out.vertices = mesh.vertices;
  out.boundary_vertex = mesh.boundary_vertex;

  // New vertices per edge, ordered from edge.a to edge.b.
  std::vector<std::vector<int>> edge_interior(topo.n_edges());
  for (int e = 0; e < topo.n_edges(); ++e) {
    const auto& edge = topo.edges[e];
    Eigen::Vector2d pa = mesh.vertices[edge.a], pb = mesh.vertices[edge.b];
    double len = (pb - pa).norm();
    int parts = std::max(1, static_cast<int>(std::ceil(len / target_hb * (1.0 - 1e-12))));
    bool bnd = topo.is_boundary_edge(e);
    for (int k = 1; k < parts; ++k) {
      double t = static_cast<double>(k) / parts;
      out.vertices.push_back(pa + t * (pb - pa));
      out.boundary_vertex.push_back(bnd);
      edge_interior[e].push_back(out.n_vertices() - 1);
    }
  }

  out.elements.reserve(mesh.elements.size());
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const auto& cyc = mesh.elements[e];
    std::vector<int> ncyc;
    for (size_t i = 0; i < cyc.size(); ++i) {
      int a = cyc[i], b = cyc[(i + 1) % cyc.size()];
      ncyc.push_back(a);
      const auto& interior = edge_interior[topo.element_edges[e][i]];
      if (a < b)
        ncyc.insert(ncyc.end(), interior.begin(), interior.end());
      else
        ncyc.insert(ncyc.end(), interior.rbegin(), interior.rend());
    }
    out.elements.push_back(std::move(ncyc));
  }
  return out;
}

//------------------------------------------------------------------------------
// Voronoi / Lloyd
//------------------------------------------------------------------------------

namespace {

// Keeps the part of a convex CCW polygon with (x - point) . normal <= 0.
Polygon clip_half_plane(const Polygon& poly, const Eigen::Vector2d& point,
                        const Eigen::Vector2d& normal)
{
  Polygon out;
  size_t n = poly.size();
  for (size_t i = 0; i < n; ++i) {
    const Eigen::Vector2d& cur = poly[i];
    const Eigen::Vector2d& nxt = poly[(i + 1) % n];
    double dc = (cur - point).dot(normal);
    double dn = (nxt - point).dot(normal);
    if (dc <= 0.0) out.push_back(cur);
    if ((dc < 0.0 && dn > 0.0) || (dc > 0.0 && dn < 0.0)) {
      double t = dc / (dc - dn);
      out.push_back(cur + t * (nxt - cur));
    }
  }
  return out;
}

Polygon voronoi_cell(const std::vector<Eigen::Vector2d>& seeds, size_t i)
{
  Polygon cell = {{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}};
  for (size_t j = 0; j < seeds.size(); ++j) {
    if (j == i || cell.empty()) continue;
    Eigen::Vector2d mid = 0.5 * (seeds[i] + seeds[j]);
    Eigen::Vector2d normal = seeds[j] - seeds[i];
    cell = clip_half_plane(cell, mid, normal);
  }
  // Drop near-duplicate consecutive intersection points.
  Polygon clean;
  for (const auto& p : cell) {
    if (clean.empty() || (p - clean.back()).norm() > 1e-12) clean.push_back(p);
  }
  while (clean.size() > 1 && (clean.front() - clean.back()).norm() <= 1e-12) clean.pop_back();
  return clean;
}

std::vector<Eigen::Vector2d> lloyd_relax(std::vector<Eigen::Vector2d> seeds, int iters)
{
  for (int it = 0; it < iters; ++it) {
    std::vector<Eigen::Vector2d> next(seeds.size());
    for (size_t i = 0; i < seeds.size(); ++i) {
      Polygon cell = voronoi_cell(seeds, i);
      next[i] = cell.size() >= 3 ? polygon_centroid(cell) : seeds[i];
    }
    seeds = std::move(next);
  }
  return seeds;
}

std::vector<Eigen::Vector2d> random_seeds(int n, std::uint64_t rng_seed)
{
  std::mt19937_64 rng(rng_seed);
  std::vector<Eigen::Vector2d> seeds(n);
  for (auto& s : seeds) {
    s.x() = rng_unit(rng);
    s.y() = rng_unit(rng);
  }
  return seeds;
}

} // namespace

PolyMesh generate_voronoi_mesh(int n_seeds, int lloyd_iters, std::uint64_t rng_seed)
{
  if (n_seeds < 1) throw MeshError("generate_voronoi_mesh: n_seeds must be >= 1");
  std::vector<Eigen::Vector2d> seeds = lloyd_relax(random_seeds(n_seeds, rng_seed), lloyd_iters);

  std::vector<Polygon> cells(n_seeds);
  for (int i = 0; i < n_seeds; ++i) {
    cells[i] = voronoi_cell(seeds, i);
    if (cells[i].size() < 3 || polygon_signed_area(cells[i]) < 1e-12)
      throw MeshError("generate_voronoi_mesh: degenerate cell for seed " + std::to_string(i));
  }

  // Weld coincident cell corners into shared mesh vertices.
  struct Corner {
    Eigen::Vector2d p;
    int cell, slot;
  };
  std::vector<Corner> corners;
  for (int i = 0; i < n_seeds; ++i)
    for (size_t k = 0; k < cells[i].size(); ++k)
      corners.push_back({cells[i][k], i, static_cast<int>(k)});

  std::vector<int> order(corners.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (corners[a].p.x() != corners[b].p.x()) return corners[a].p.x() < corners[b].p.x();
    return corners[a].p.y() < corners[b].p.y();
  });

  PolyMesh mesh;
  std::vector<int> corner_vertex(corners.size(), -1);
  for (size_t oi = 0; oi < order.size(); ++oi) {
    int ci = order[oi];
    if (corner_vertex[ci] >= 0) continue;
    int v = mesh.n_vertices();
    mesh.vertices.push_back(corners[ci].p);
    corner_vertex[ci] = v;
    for (size_t oj = oi + 1; oj < order.size(); ++oj) {
      int cj = order[oj];
      if (corners[cj].p.x() - corners[ci].p.x() > kGeomTol) break;
      if (corner_vertex[cj] < 0 && (corners[cj].p - corners[ci].p).norm() <= kGeomTol)
        corner_vertex[cj] = v;
    }
  }

  std::vector<std::vector<int>> cell_vertex(n_seeds);
  for (size_t c = 0; c < corners.size(); ++c) {
    auto& cv = cell_vertex[corners[c].cell];
    if (cv.size() <= static_cast<size_t>(corners[c].slot)) cv.resize(corners[c].slot + 1);
    cv[corners[c].slot] = corner_vertex[c];
  }
  for (int i = 0; i < n_seeds; ++i) {
    std::vector<int> cyc;
    for (int v : cell_vertex[i])
      if (cyc.empty() || v != cyc.back()) cyc.push_back(v);
    while (cyc.size() > 1 && cyc.front() == cyc.back()) cyc.pop_back();
    if (cyc.size() < 3)
      throw MeshError("generate_voronoi_mesh: degenerate cell after welding, seed " + std::to_string(i));
    mesh.elements.push_back(std::move(cyc));
  }
  mesh.boundary_vertex.resize(mesh.vertices.size());
  for (int v = 0; v < mesh.n_vertices(); ++v)
    mesh.boundary_vertex[v] = on_unit_square_boundary(mesh.vertices[v]);
  return mesh;
}

//------------------------------------------------------------------------------
// Agglomeration
//------------------------------------------------------------------------------

PolyMesh agglomerate_with_seeds(const PolyMesh& fine, const std::vector<Eigen::Vector2d>& seeds)
{
  if (seeds.empty()) throw MeshError("agglomerate: need at least one seed");
  int ne = fine.n_elements();
  MeshTopology topo = build_topology(fine);

  std::vector<int> owner(ne);
  for (int e = 0; e < ne; ++e) {
    Eigen::Vector2d c = polygon_centroid(fine.element_polygon(e));
    int best = 0;
    double bestd = (c - seeds[0]).squaredNorm();
    for (size_t s = 1; s < seeds.size(); ++s) {
      double d = (c - seeds[s]).squaredNorm();
      if (d < bestd) {
        bestd = d;
        best = static_cast<int>(s);
      }
    }
    owner[e] = best;
  }

  // Element adjacency through interior edges.
  std::vector<std::vector<int>> neighbors(ne);
  for (const auto& edge : topo.edges)
    if (edge.n_incident == 2) {
      neighbors[edge.elem[0]].push_back(edge.elem[1]);
      neighbors[edge.elem[1]].push_back(edge.elem[0]);
    }

  // Connected components within each owner group, in deterministic order.
  std::vector<int> comp(ne, -1);
  std::vector<std::vector<int>> components;
  for (int e = 0; e < ne; ++e) {
    if (comp[e] >= 0) continue;
    int id = static_cast<int>(components.size());
    components.emplace_back();
    std::queue<int> bfs;
    bfs.push(e);
    comp[e] = id;
    while (!bfs.empty()) {
      int cur = bfs.front();
      bfs.pop();
      components[id].push_back(cur);
      for (int nb : neighbors[cur])
        if (comp[nb] < 0 && owner[nb] == owner[e]) {
          comp[nb] = id;
          bfs.push(nb);
        }
    }
  }

  PolyMesh out;
  std::vector<int> vertex_map(fine.n_vertices(), -1);
  std::vector<std::vector<int>> cycles;
  for (const auto& members : components) {
    std::vector<char> inside(ne, 0);
    for (int e : members) inside[e] = 1;

    // Directed boundary edges of the component, walked as one cycle.
    std::map<int, int> next;
    int start = std::numeric_limits<int>::max();
    size_t n_bnd = 0;
    for (int e : members) {
      const auto& cyc = fine.elements[e];
      for (size_t i = 0; i < cyc.size(); ++i) {
        const auto& edge = topo.edges[topo.element_edges[e][i]];
        int other = edge.elem[0] == e ? edge.elem[1] : edge.elem[0];
        if (other >= 0 && inside[other]) continue;
        int a = cyc[i], b = cyc[(i + 1) % cyc.size()];
        if (next.count(a))
          throw MeshError("agglomerate: component boundary touches itself (not a simple polygon)");
        next[a] = b;
        start = std::min(start, a);
        ++n_bnd;
      }
    }
    std::vector<int> cycle;
    int v = start;
    do {
      cycle.push_back(v);
      v = next.at(v);
    } while (v != start && cycle.size() <= n_bnd);
    if (cycle.size() != n_bnd)
      throw MeshError("agglomerate: component boundary is not a single cycle (hole inside agglomerate)");
    cycles.push_back(std::move(cycle));
  }

  // Compact vertices, keeping the fine ordering.
  std::vector<char> used(fine.n_vertices(), 0);
  for (const auto& cyc : cycles)
    for (int v : cyc) used[v] = 1;
  for (int v = 0; v < fine.n_vertices(); ++v)
    if (used[v]) {
      vertex_map[v] = out.n_vertices();
      out.vertices.push_back(fine.vertices[v]);
      out.boundary_vertex.push_back(fine.boundary_vertex[v]);
    }
  for (auto& cyc : cycles) {
    for (int& v : cyc) v = vertex_map[v];
    out.elements.push_back(std::move(cyc));
  }
  return out;
}

PolyMesh agglomerate(const PolyMesh& fine, int n_coarse_seeds, std::uint64_t rng_seed)
{
  if (n_coarse_seeds < 1) throw MeshError("agglomerate: n_coarse_seeds must be >= 1");
  // Relaxed seeds give well-spread, connected agglomerates.
  std::vector<Eigen::Vector2d> seeds =
      lloyd_relax(random_seeds(n_coarse_seeds, rng_seed), 30);
  return agglomerate_with_seeds(fine, seeds);
}

//------------------------------------------------------------------------------
// JSON I/O
//------------------------------------------------------------------------------

std::string mesh_to_json_string(const PolyMesh& mesh)
{
  std::ostringstream os;
  char buf[64];
  os << "{\n\"vertices\": [\n";
  for (int v = 0; v < mesh.n_vertices(); ++v) {
    std::snprintf(buf, sizeof buf, "[%.17g, %.17g]", mesh.vertices[v].x(), mesh.vertices[v].y());
    os << buf << (v + 1 < mesh.n_vertices() ? ",\n" : "\n");
  }
  os << "],\n\"elements\": [\n";
  for (int e = 0; e < mesh.n_elements(); ++e) {
    os << "[";
    for (size_t i = 0; i < mesh.elements[e].size(); ++i)
      os << mesh.elements[e][i] << (i + 1 < mesh.elements[e].size() ? ", " : "");
    os << "]" << (e + 1 < mesh.n_elements() ? ",\n" : "\n");
  }
  os << "],\n\"boundary\": [";
  for (int v = 0; v < mesh.n_vertices(); ++v)
    os << (mesh.boundary_vertex[v] ? 1 : 0) << (v + 1 < mesh.n_vertices() ? ", " : "");
  os << "]\n}\n";
  return os.str();
}

PolyMesh mesh_from_json_string(const std::string& text)
{
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& err) {
    throw MeshError(std::string("mesh JSON parse error: ") + err.what());
  }
  for (const char* key : {"vertices", "elements", "boundary"})
    if (!j.contains(key) || !j[key].is_array())
      throw MeshError(std::string("mesh JSON missing array field '") + key + "'");

  PolyMesh mesh;
  try {
    for (const auto& v : j["vertices"]) {
      if (!v.is_array() || v.size() != 2)
        throw MeshError("mesh JSON field 'vertices': entries must be [x, y]");
      mesh.vertices.emplace_back(v[0].get<double>(), v[1].get<double>());
    }
    for (const auto& el : j["elements"]) {
      if (!el.is_array()) throw MeshError("mesh JSON field 'elements': entries must be arrays");
      mesh.elements.push_back(el.get<std::vector<int>>());
    }
    for (const auto& b : j["boundary"]) mesh.boundary_vertex.push_back(b.get<int>() != 0);
  } catch (const nlohmann::json::exception& err) {
    throw MeshError(std::string("mesh JSON type error: ") + err.what());
  }
  validate_mesh(mesh);
  return mesh;
}

void save_mesh(const PolyMesh& mesh, const std::string& path)
{
  std::ofstream out(path);
  if (!out) throw MeshError("cannot open '" + path + "' for writing");
  out << mesh_to_json_string(mesh);
}

PolyMesh load_mesh(const std::string& path)
{
  std::ifstream in(path);
  if (!in) throw MeshError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return mesh_from_json_string(ss.str());
  } catch (const MeshError& err) {
    throw MeshError(path + ": " + err.what());
  }
}

bool meshes_equivalent(const PolyMesh& a, const PolyMesh& b, double tol)
{
  if (a.n_vertices() != b.n_vertices() || a.n_elements() != b.n_elements()) return false;
  for (int v = 0; v < a.n_vertices(); ++v)
    if ((a.vertices[v] - b.vertices[v]).norm() > tol) return false;
  for (int e = 0; e < a.n_elements(); ++e) {
    const auto& ca = a.elements[e];
    const auto& cb = b.elements[e];
    if (ca.size() != cb.size()) return false;
    size_t n = ca.size();
    size_t shift = 0;
    while (shift < n && cb[shift] != ca[0]) ++shift;
    if (shift == n) return false;
    for (size_t i = 0; i < n; ++i)
      if (ca[i] != cb[(shift + i) % n]) return false;
  }
  return true;
}

} // namespace vempoly
