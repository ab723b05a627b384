#pragma once

#include <vempoly/mesh.hpp>
#include <vempoly/monomials.hpp>
#include <vempoly/polygon.hpp>
#include <vempoly/quadrature1d.hpp>

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace vempoly {

using ScalarField = std::function<double(const Eigen::Vector2d&)>;
using VectorField = std::function<Eigen::Vector2d(const Eigen::Vector2d&)>;

/// Interior and boundary polynomial degrees (k_o, k_b), k_o >= k_b >= 1.
/// k_o > k_b is the enriched regime: extra interior moments only.
struct Orders {
  int ko;
  int kb;
  Orders(int ko_, int kb_);
  bool operator==(const Orders&) const = default;
};

/// Global DoF numbering: vertex values, then edge values (k_b - 1 per edge,
/// ordered along the edge from its lower-index vertex), then per-element
/// moments against P_{k_o-2}. Boundary DoFs are shared through the mesh
/// topology; moments are element-private.
struct DofLayout {
  explicit DofLayout(Orders o) : orders(o) {}

  Orders orders;
  int n_vertex_dofs = 0;
  int n_edge_dofs = 0;
  int n_moment_dofs = 0;
  int n_global = 0;

  std::vector<std::vector<int>> element_dofs; // local -> global
  std::vector<bool> is_boundary_dof;          // Dirichlet nodes (never moments)
  std::vector<Eigen::Vector2d> dof_point;     // node position; zero for moments

  int edge_dof_start(int edge) const;
  int moment_dof_start(int element) const;

private:
  friend DofLayout build_dof_layout(const PolyMesh&, const MeshTopology&, Orders);
  int m_per_edge = 0;
  int m_per_elem = 0;
  int m_n_vertices = 0;
  int m_n_edges = 0;
};

DofLayout build_dof_layout(const PolyMesh& mesh, const MeshTopology& topo, Orders orders);

/// Lagrange basis values / first derivatives at x for the given 1D nodes.
Eigen::VectorXd lagrange_values(const Eigen::VectorXd& nodes, double x);
Eigen::VectorXd lagrange_derivatives(const Eigen::VectorXd& nodes, double x);

/// Per-element machinery of the generalized space: scaled monomial basis of
/// degree k_o, quadrature, DoF-evaluation matrices and the computable
/// projections.
///
/// Everything is built on the enlarged order-k_o boundary representation
/// (vertices, k_o-1 Gauss-Lobatto values per edge, moments): functions of the
/// (k_o, k_b) space embed exactly through `embed()` since their traces are
/// piecewise P_kb, and degree-k_o polynomials are represented exactly there,
/// which is what makes the projector reproduce them.
class ElementOperators {
public:
  ElementOperators(Polygon polygon, Orders orders);

  const Polygon& polygon() const { return m_polygon; }
  const Orders& orders() const { return m_orders; }
  double area() const { return m_area; }
  double diameter() const { return m_diameter; }
  double perimeter() const { return m_perimeter; }
  const Eigen::Vector2d& centroid() const { return m_centroid; }
  const MonomialBasis& basis() const { return m_basis; }
  const Quadrature2D& quadrature() const { return m_quad; }

  int n_vertices() const { return static_cast<int>(m_polygon.size()); }
  int n_dofs() const;            // N_E = l_E k_b + dim P_{ko-2}
  int n_enlarged_dofs() const;   // l_E k_o + dim P_{ko-2}
  int n_poly() const { return MonomialBasis::dim(m_orders.ko); }
  int n_moments() const { return MonomialBasis::dim(m_orders.ko - 2); }

  /// DoF functionals of the monomials, N_E x n_poly. For degree > k_b rows
  /// these are plain point evaluations, not an embedding of the polynomial.
  const Eigen::MatrixXd& dof_matrix() const { return m_D; }
  /// Enlarged DoFs of the monomials (the faithful polynomial representation).
  const Eigen::MatrixXd& dof_matrix_enlarged() const { return m_Dtil; }
  /// Exact embedding of (k_o, k_b) DoF vectors into the enlarged set.
  const Eigen::MatrixXd& embed() const { return m_T; }

  /// H^1-seminorm projection onto P_{ko}, acting on (k_o, k_b) DoF vectors.
  const Eigen::MatrixXd& pi_nabla() const { return m_PiN; }
  /// The same projection on enlarged DoF vectors.
  const Eigen::MatrixXd& pi_nabla_enlarged() const { return m_PiNtil; }
  /// L^2 projection onto P_{ko-2} (read off the moments).
  const Eigen::MatrixXd& pi0() const { return m_Pi0; }
  /// L^2 projection of the gradient onto [P_{ko-1}]^2, per component.
  const Eigen::MatrixXd& pi0_grad_x() const { return m_Pi0gx; }
  const Eigen::MatrixXd& pi0_grad_y() const { return m_Pi0gy; }
  /// The same on enlarged DoF vectors (exact on P_ko polynomials).
  const Eigen::MatrixXd& pi0_grad_x_enlarged() const { return m_Pi0gx_til; }
  const Eigen::MatrixXd& pi0_grad_y_enlarged() const { return m_Pi0gy_til; }

  /// Gradient Gram matrix of the monomials (no constraint row).
  const Eigen::MatrixXd& grad_gram() const { return m_Gtil; }
  /// Mass matrix of the monomials up to degree k_o.
  const Eigen::MatrixXd& mass() const { return m_H; }
  /// Integration-by-parts matrix a(m_a, v) on enlarged DoFs, no constraint row.
  const Eigen::MatrixXd& ibp_matrix() const { return m_Bfull; }

  /// DoF interpolant: boundary nodal values plus quadrature moments of v.
  Eigen::VectorXd interpolate(const ScalarField& v) const;
  /// Enlarged-space interpolant (used to feed polynomials and stabilization tests).
  Eigen::VectorXd interpolate_enlarged(const ScalarField& v) const;
  /// Enlarged DoFs of the polynomial with the given monomial coefficients.
  Eigen::VectorXd polynomial_enlarged_dofs(const Eigen::VectorXd& coeffs) const;

  /// Conditioning diagnostic on the enlarged DoF-evaluation matrix.
  double dof_matrix_min_singular_value() const;

  // Edge-local data, shared with the forms and error modules.
  struct EdgeData {
    Eigen::Vector2d a, b;       // endpoints in traversal (CCW) order
    double length;
    Eigen::Vector2d tangent;    // unit, a -> b
    Eigen::Vector2d normal;     // unit outward
    Eigen::VectorXd node_params;          // k_b + 1 Lobatto params in [0,1]
    std::vector<int> node_dofs;           // local (k_o,k_b) DoF ids of the nodes
    Eigen::VectorXd enlarged_params;      // k_o + 1 Lobatto params
    std::vector<int> enlarged_dofs;       // local enlarged DoF ids
  };
  const std::vector<EdgeData>& edges() const { return m_edges; }
  const Rule1D& edge_rule() const { return m_edge_rule; }

  /// Integral over E of the scaled monomial of the given graded-lex index,
  /// available up to degree 2 k_o.
  double monomial_integral(int i) const { return m_mono_int[i]; }

private:
  Polygon m_polygon;
  Orders m_orders;
  double m_area, m_diameter, m_perimeter;
  Eigen::Vector2d m_centroid;
  MonomialBasis m_basis;
  Quadrature2D m_quad;
  Rule1D m_edge_rule;
  std::vector<EdgeData> m_edges;
  Eigen::VectorXd m_mono_int;
  Eigen::MatrixXd m_D, m_Dtil, m_T, m_Bfull, m_PiN, m_PiNtil, m_Pi0, m_Pi0gx, m_Pi0gy;
  Eigen::MatrixXd m_Pi0gx_til, m_Pi0gy_til;
  Eigen::MatrixXd m_Gtil, m_H;
};

/// Builds the element operators for every mesh element (in parallel).
std::vector<ElementOperators> build_element_operators(const PolyMesh& mesh, Orders orders);

} // namespace vempoly
