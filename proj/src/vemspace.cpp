#include <vempoly/vemspace.hpp>
#include <vempoly/parallel.hpp>

#include <Eigen/SVD>
#include <cassert>
#include <cmath>
#include <optional>
#include <stdexcept>

namespace vempoly {

Orders::Orders(int ko_, int kb_) : ko(ko_), kb(kb_)
{
  if (!(ko >= kb && kb >= 1))
    throw std::invalid_argument("Orders: need ko >= kb >= 1");
}

//------------------------------------------------------------------------------
// DoF layout
//------------------------------------------------------------------------------

int DofLayout::edge_dof_start(int edge) const
{
  return m_n_vertices + edge * m_per_edge;
}

int DofLayout::moment_dof_start(int element) const
{
  return m_n_vertices + m_n_edges * m_per_edge + element * m_per_elem;
}

DofLayout build_dof_layout(const PolyMesh& mesh, const MeshTopology& topo, Orders orders)
{
  DofLayout L(orders);
  L.m_per_edge = orders.kb - 1;
  L.m_per_elem = MonomialBasis::dim(orders.ko - 2);
  L.m_n_vertices = mesh.n_vertices();
  L.m_n_edges = topo.n_edges();
  L.n_vertex_dofs = mesh.n_vertices();
  L.n_edge_dofs = topo.n_edges() * L.m_per_edge;
  L.n_moment_dofs = mesh.n_elements() * L.m_per_elem;
  L.n_global = L.n_vertex_dofs + L.n_edge_dofs + L.n_moment_dofs;

  L.is_boundary_dof.assign(L.n_global, false);
  L.dof_point.assign(L.n_global, Eigen::Vector2d::Zero());
  for (int v = 0; v < mesh.n_vertices(); ++v) {
    L.is_boundary_dof[v] = mesh.boundary_vertex[v];
    L.dof_point[v] = mesh.vertices[v];
  }
  Eigen::VectorXd params = lobatto_interior(orders.kb);
  for (int e = 0; e < topo.n_edges(); ++e) {
    const auto& edge = topo.edges[e];
    Eigen::Vector2d pa = mesh.vertices[edge.a], pb = mesh.vertices[edge.b];
    for (int j = 0; j < L.m_per_edge; ++j) {
      int g = L.edge_dof_start(e) + j;
      L.dof_point[g] = pa + params[j] * (pb - pa);
      L.is_boundary_dof[g] = topo.is_boundary_edge(e);
    }
  }

  L.element_dofs.resize(mesh.n_elements());
  for (int el = 0; el < mesh.n_elements(); ++el) {
    const auto& cyc = mesh.elements[el];
    size_t nv = cyc.size();
    auto& dofs = L.element_dofs[el];
    dofs.reserve(nv * orders.kb + L.m_per_elem);
    for (int v : cyc) dofs.push_back(v);
    for (size_t i = 0; i < nv; ++i) {
      int ge = topo.element_edges[el][i];
      bool forward = cyc[i] < cyc[(i + 1) % nv]; // traversal matches canonical a < b
      for (int j = 0; j < L.m_per_edge; ++j) {
        int slot = forward ? j : L.m_per_edge - 1 - j;
        dofs.push_back(L.edge_dof_start(ge) + slot);
      }
    }
    for (int i = 0; i < L.m_per_elem; ++i) dofs.push_back(L.moment_dof_start(el) + i);
  }
  return L;
}

//------------------------------------------------------------------------------
// Lagrange helpers
//------------------------------------------------------------------------------

Eigen::VectorXd lagrange_values(const Eigen::VectorXd& nodes, double x)
{
  int n = static_cast<int>(nodes.size());
  Eigen::VectorXd out(n);
  for (int j = 0; j < n; ++j) {
    double v = 1.0;
    for (int l = 0; l < n; ++l)
      if (l != j) v *= (x - nodes[l]) / (nodes[j] - nodes[l]);
    out[j] = v;
  }
  return out;
}

Eigen::VectorXd lagrange_derivatives(const Eigen::VectorXd& nodes, double x)
{
  int n = static_cast<int>(nodes.size());
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  for (int j = 0; j < n; ++j) {
    for (int l = 0; l < n; ++l) {
      if (l == j) continue;
      double term = 1.0 / (nodes[j] - nodes[l]);
      for (int r = 0; r < n; ++r)
        if (r != j && r != l) term *= (x - nodes[r]) / (nodes[j] - nodes[r]);
      out[j] += term;
    }
  }
  return out;
}

//------------------------------------------------------------------------------
// ElementOperators
//------------------------------------------------------------------------------

namespace {

Eigen::VectorXd edge_node_params(int k)
{
  Eigen::VectorXd params(k + 1);
  params[0] = 0.0;
  params[k] = 1.0;
  Eigen::VectorXd interior = lobatto_interior(k);
  for (int j = 0; j < k - 1; ++j) params[1 + j] = interior[j];
  return params;
}

} // namespace

ElementOperators::ElementOperators(Polygon polygon, Orders orders)
  : m_polygon(std::move(polygon)),
    m_orders(orders),
    m_area(polygon_signed_area(m_polygon)),
    m_diameter(polygon_diameter(m_polygon)),
    m_perimeter(polygon_perimeter(m_polygon)),
    m_centroid(polygon_centroid(m_polygon)),
    m_basis(m_centroid, m_diameter, orders.ko),
    m_quad(polygon_quadrature(m_polygon, 2 * orders.ko + 2))
{
  if (m_area <= 0.0)
    throw std::runtime_error("ElementOperators: polygon is degenerate or clockwise");

  const int ko = m_orders.ko, kb = m_orders.kb;
  const int nv = n_vertices();
  const int np = n_poly();
  const int nm = n_moments();
  const int N = n_dofs();
  const int Nt = n_enlarged_dofs();
  const int moment0 = nv * kb;        // local moment offset, (k_o,k_b) layout
  const int moment0t = nv * ko;       // local moment offset, enlarged layout

  m_edge_rule = gauss_for_degree(2 * ko + 2);

  // Integrals of all scaled monomials up to degree 2 k_o.
  MonomialBasis big(m_centroid, m_diameter, 2 * ko);
  m_mono_int = Eigen::VectorXd::Zero(big.size());
  for (Eigen::Index q = 0; q < m_quad.weights.size(); ++q) {
    Eigen::Vector2d x(m_quad.points(q, 0), m_quad.points(q, 1));
    m_mono_int += m_quad.weights[q] * big.eval_all(x);
  }

  auto product_integral = [&](int i, int j) {
    auto [ax, ay] = MonomialBasis::exponents(i);
    auto [bx, by] = MonomialBasis::exponents(j);
    return m_mono_int[MonomialBasis::index(ax + bx, ay + by)];
  };

  m_H.resize(np, np);
  for (int i = 0; i < np; ++i)
    for (int j = 0; j < np; ++j) m_H(i, j) = product_integral(i, j);

  m_Gtil = Eigen::MatrixXd::Zero(np, np);
  for (int i = 0; i < np; ++i)
    for (int j = 0; j < np; ++j) {
      double s = 0.0;
      for (const auto& [ii, ci] : m_basis.dx_coeffs(i))
        for (const auto& [jj, cj] : m_basis.dx_coeffs(j)) s += ci * cj * product_integral(ii, jj);
      for (const auto& [ii, ci] : m_basis.dy_coeffs(i))
        for (const auto& [jj, cj] : m_basis.dy_coeffs(j)) s += ci * cj * product_integral(ii, jj);
      m_Gtil(i, j) = s;
    }

  // Edge data.
  Eigen::VectorXd params_b = edge_node_params(kb);
  Eigen::VectorXd params_o = edge_node_params(ko);
  m_edges.resize(nv);
  for (int i = 0; i < nv; ++i) {
    EdgeData& ed = m_edges[i];
    ed.a = m_polygon[i];
    ed.b = m_polygon[(i + 1) % nv];
    ed.length = (ed.b - ed.a).norm();
    ed.tangent = (ed.b - ed.a) / ed.length;
    ed.normal = Eigen::Vector2d(ed.tangent.y(), -ed.tangent.x());
    ed.node_params = params_b;
    ed.enlarged_params = params_o;
    ed.node_dofs.push_back(i);
    for (int j = 0; j < kb - 1; ++j) ed.node_dofs.push_back(nv + i * (kb - 1) + j);
    ed.node_dofs.push_back((i + 1) % nv);
    ed.enlarged_dofs.push_back(i);
    for (int j = 0; j < ko - 1; ++j) ed.enlarged_dofs.push_back(nv + i * (ko - 1) + j);
    ed.enlarged_dofs.push_back((i + 1) % nv);
  }

  // DoF-evaluation matrices.
  m_D = Eigen::MatrixXd::Zero(N, np);
  m_Dtil = Eigen::MatrixXd::Zero(Nt, np);
  for (int i = 0; i < nv; ++i) {
    m_D.row(i) = m_basis.eval_all(m_polygon[i]).transpose();
    m_Dtil.row(i) = m_D.row(i);
  }
  for (int i = 0; i < nv; ++i) {
    const EdgeData& ed = m_edges[i];
    for (int j = 0; j < kb - 1; ++j) {
      Eigen::Vector2d x = ed.a + ed.node_params[j + 1] * (ed.b - ed.a);
      m_D.row(nv + i * (kb - 1) + j) = m_basis.eval_all(x).transpose();
    }
    for (int j = 0; j < ko - 1; ++j) {
      Eigen::Vector2d x = ed.a + ed.enlarged_params[j + 1] * (ed.b - ed.a);
      m_Dtil.row(nv + i * (ko - 1) + j) = m_basis.eval_all(x).transpose();
    }
  }
  for (int i = 0; i < nm; ++i)
    for (int b = 0; b < np; ++b) {
      m_D(moment0 + i, b) = product_integral(i, b) / m_area;
      m_Dtil(moment0t + i, b) = m_D(moment0 + i, b);
    }

  // Embedding of (k_o,k_b) DoFs into the enlarged set: re-evaluate the
  // piecewise-P_kb trace at the k_o Lobatto nodes.
  m_T = Eigen::MatrixXd::Zero(Nt, N);
  for (int i = 0; i < nv; ++i) m_T(i, i) = 1.0;
  for (int i = 0; i < nv; ++i) {
    const EdgeData& ed = m_edges[i];
    for (int j = 0; j < ko - 1; ++j) {
      Eigen::VectorXd lag = lagrange_values(ed.node_params, ed.enlarged_params[j + 1]);
      for (size_t n = 0; n < ed.node_dofs.size(); ++n)
        m_T(nv + i * (ko - 1) + j, ed.node_dofs[n]) += lag[n];
    }
  }
  for (int i = 0; i < nm; ++i) m_T(moment0t + i, moment0 + i) = 1.0;

  // Integration-by-parts matrix B on enlarged DoFs:
  //   a(m_a, v) = -int_E (Lap m_a) v + int_bE (grad m_a . n) v.
  m_Bfull = Eigen::MatrixXd::Zero(np, Nt);
  for (int a = 0; a < np; ++a)
    for (const auto& [i, c] : m_basis.laplacian_coeffs(a))
      m_Bfull(a, moment0t + i) -= c * m_area;
  Eigen::MatrixXd bmean_row = Eigen::MatrixXd::Zero(1, Nt);
  Eigen::MatrixXd gmean_row = Eigen::MatrixXd::Zero(1, np);
  for (const EdgeData& ed : m_edges) {
    for (Eigen::Index q = 0; q < m_edge_rule.points.size(); ++q) {
      double t = m_edge_rule.points[q];
      double w = m_edge_rule.weights[q] * ed.length;
      Eigen::Vector2d x = ed.a + t * (ed.b - ed.a);
      Eigen::VectorXd lag = lagrange_values(ed.enlarged_params, t);
      auto grads = m_basis.grad_all(x);
      for (int a = 0; a < np; ++a) {
        double dn = grads.row(a).dot(ed.normal);
        for (size_t n = 0; n < ed.enlarged_dofs.size(); ++n)
          m_Bfull(a, ed.enlarged_dofs[n]) += w * dn * lag[n];
      }
      Eigen::VectorXd vals = m_basis.eval_all(x);
      gmean_row += (w / m_perimeter) * vals.transpose();
      for (size_t n = 0; n < ed.enlarged_dofs.size(); ++n)
        bmean_row(0, ed.enlarged_dofs[n]) += (w / m_perimeter) * lag[n];
    }
  }

  // Projector system: gradient orthogonality plus the boundary-mean condition
  // replacing the constant row.
  Eigen::MatrixXd G = m_Gtil;
  G.row(0) = gmean_row;
  Eigen::MatrixXd B = m_Bfull;
  B.row(0) = bmean_row;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(G);
  m_PiNtil = lu.solve(B);
  m_PiN = m_PiNtil * m_T;

  // L^2 projection onto P_{ko-2}: moments are the data.
  m_Pi0 = Eigen::MatrixXd::Zero(nm, N);
  if (nm > 0) {
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(nm, N);
    for (int i = 0; i < nm; ++i) rhs(i, moment0 + i) = m_area;
    m_Pi0 = m_H.topLeftCorner(nm, nm).ldlt().solve(rhs);
  }

  // Gradient L^2 projection onto [P_{ko-1}]^2, one component at a time:
  //   int_E p (grad v)_x = -int_E (dp/dx) v + int_bE p n_x v,
  // built on the enlarged trace so it is exact on degree-k_o polynomials,
  // then pulled back through the embedding.
  int nm1 = MonomialBasis::dim(ko - 1);
  Eigen::MatrixXd Bgx = Eigen::MatrixXd::Zero(nm1, Nt);
  Eigen::MatrixXd Bgy = Eigen::MatrixXd::Zero(nm1, Nt);
  for (int b = 0; b < nm1; ++b) {
    for (const auto& [i, c] : m_basis.dx_coeffs(b)) Bgx(b, moment0t + i) -= c * m_area;
    for (const auto& [i, c] : m_basis.dy_coeffs(b)) Bgy(b, moment0t + i) -= c * m_area;
  }
  for (const EdgeData& ed : m_edges) {
    for (Eigen::Index q = 0; q < m_edge_rule.points.size(); ++q) {
      double t = m_edge_rule.points[q];
      double w = m_edge_rule.weights[q] * ed.length;
      Eigen::Vector2d x = ed.a + t * (ed.b - ed.a);
      Eigen::VectorXd lag = lagrange_values(ed.enlarged_params, t);
      Eigen::VectorXd vals = m_basis.eval_all(x);
      for (int b = 0; b < nm1; ++b)
        for (size_t n = 0; n < ed.enlarged_dofs.size(); ++n) {
          Bgx(b, ed.enlarged_dofs[n]) += w * vals[b] * ed.normal.x() * lag[n];
          Bgy(b, ed.enlarged_dofs[n]) += w * vals[b] * ed.normal.y() * lag[n];
        }
    }
  }
  auto Hm1 = m_H.topLeftCorner(nm1, nm1).ldlt();
  m_Pi0gx_til = Hm1.solve(Bgx);
  m_Pi0gy_til = Hm1.solve(Bgy);
  m_Pi0gx = m_Pi0gx_til * m_T;
  m_Pi0gy = m_Pi0gy_til * m_T;
}

int ElementOperators::n_dofs() const
{
  return n_vertices() * m_orders.kb + n_moments();
}

int ElementOperators::n_enlarged_dofs() const
{
  return n_vertices() * m_orders.ko + n_moments();
}

Eigen::VectorXd ElementOperators::interpolate(const ScalarField& v) const
{
  const int nv = n_vertices(), kb = m_orders.kb;
  Eigen::VectorXd dofs(n_dofs());
  for (int i = 0; i < nv; ++i) dofs[i] = v(m_polygon[i]);
  for (int i = 0; i < nv; ++i) {
    const EdgeData& ed = m_edges[i];
    for (int j = 0; j < kb - 1; ++j)
      dofs[nv + i * (kb - 1) + j] = v(ed.a + ed.node_params[j + 1] * (ed.b - ed.a));
  }
  int moment0 = nv * kb;
  for (int i = 0; i < n_moments(); ++i) {
    double m = m_quad.integrate([&](const Eigen::Vector2d& x) { return v(x) * m_basis.eval(i, x); });
    dofs[moment0 + i] = m / m_area;
  }
  return dofs;
}

Eigen::VectorXd ElementOperators::interpolate_enlarged(const ScalarField& v) const
{
  const int nv = n_vertices(), ko = m_orders.ko;
  Eigen::VectorXd dofs(n_enlarged_dofs());
  for (int i = 0; i < nv; ++i) dofs[i] = v(m_polygon[i]);
  for (int i = 0; i < nv; ++i) {
    const EdgeData& ed = m_edges[i];
    for (int j = 0; j < ko - 1; ++j)
      dofs[nv + i * (ko - 1) + j] = v(ed.a + ed.enlarged_params[j + 1] * (ed.b - ed.a));
  }
  int moment0 = nv * ko;
  for (int i = 0; i < n_moments(); ++i) {
    double m = m_quad.integrate([&](const Eigen::Vector2d& x) { return v(x) * m_basis.eval(i, x); });
    dofs[moment0 + i] = m / m_area;
  }
  return dofs;
}

Eigen::VectorXd ElementOperators::polynomial_enlarged_dofs(const Eigen::VectorXd& coeffs) const
{
  return m_Dtil * coeffs;
}

double ElementOperators::dof_matrix_min_singular_value() const
{
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m_Dtil);
  return svd.singularValues().tail(1)[0];
}

std::vector<ElementOperators> build_element_operators(const PolyMesh& mesh, Orders orders)
{
  std::vector<ElementOperators> ops;
  ops.reserve(mesh.n_elements());
  // Construction order is deterministic; the parallel path fills slots.
  std::vector<std::optional<ElementOperators>> slots(mesh.n_elements());
  parallel_for(mesh.n_elements(), [&](std::size_t start, std::size_t end) {
    for (std::size_t e = start; e < end; ++e) {
      try {
        slots[e].emplace(mesh.element_polygon(static_cast<int>(e)), orders);
      } catch (const std::exception& err) {
        throw std::runtime_error("element " + std::to_string(e) + ": " + err.what());
      }
    }
  });
  for (auto& s : slots) ops.push_back(std::move(*s));
  return ops;
}

} // namespace vempoly
