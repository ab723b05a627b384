#include <vempoly/forms.hpp>

#include <random>
#include <stdexcept>

namespace vempoly {

StabilizationKind parse_stabilization(const std::string& name)
{
  if (name == "dofi") return StabilizationKind::DofiDofi;
  if (name == "dofi-light") return StabilizationKind::DofiDofiLight;
  if (name == "trace") return StabilizationKind::Trace;
  throw std::invalid_argument("unknown stabilization '" + name + "' (use dofi|dofi-light|trace)");
}

std::string stabilization_name(StabilizationKind kind)
{
  switch (kind) {
    case StabilizationKind::DofiDofi: return "dofi";
    case StabilizationKind::DofiDofiLight: return "dofi-light";
    case StabilizationKind::Trace: return "trace";
  }
  return "?";
}

Eigen::MatrixXd consistency_matrix(const ElementOperators& op)
{
  return op.pi_nabla().transpose() * op.grad_gram() * op.pi_nabla();
}

Eigen::MatrixXd stab_dofi(const ElementOperators& op, bool light)
{
  if (light) {
    // Difference of (k_o,k_b) DoFs: identity minus DoFs of the projection.
    Eigen::MatrixXd M = op.dof_matrix() * op.pi_nabla();
    M -= Eigen::MatrixXd::Identity(op.n_dofs(), op.n_dofs());
    return M.transpose() * M;
  }
  Eigen::MatrixXd M = op.dof_matrix_enlarged() * op.pi_nabla() - op.embed();
  return M.transpose() * M;
}

Eigen::MatrixXd stab_trace(const ElementOperators& op)
{
  const int N = op.n_dofs();
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(N, N);
  const auto& rule = op.edge_rule();
  Eigen::RowVectorXd row(N);
  for (const auto& ed : op.edges()) {
    for (Eigen::Index q = 0; q < rule.points.size(); ++q) {
      double t = rule.points[q];
      double w = rule.weights[q] * ed.length;
      Eigen::Vector2d x = ed.a + t * (ed.b - ed.a);
      row.setZero();
      // d/ds of the piecewise-P_kb trace of u ...
      Eigen::VectorXd dlag = lagrange_derivatives(ed.node_params, t);
      for (size_t n = 0; n < ed.node_dofs.size(); ++n)
        row(ed.node_dofs[n]) += dlag[n] / ed.length;
      // ... minus d/ds of the projection along the edge.
      auto grads = op.basis().grad_all(x);
      for (int b = 0; b < op.n_poly(); ++b)
        row -= grads.row(b).dot(ed.tangent) * op.pi_nabla().row(b);
      S += (op.diameter() * w) * row.transpose() * row;
    }
  }
  return S;
}

Eigen::MatrixXd stabilization_matrix(const ElementOperators& op, StabilizationKind kind)
{
  switch (kind) {
    case StabilizationKind::DofiDofi: return stab_dofi(op, false);
    case StabilizationKind::DofiDofiLight: return stab_dofi(op, true);
    case StabilizationKind::Trace: return stab_trace(op);
  }
  throw std::logic_error("unreachable");
}

Eigen::MatrixXd element_stiffness(const ElementOperators& op, StabilizationKind kind,
                                  double multiplier)
{
  return consistency_matrix(op) + multiplier * stabilization_matrix(op, kind);
}

Eigen::VectorXd load_vector(const ElementOperators& op, const ScalarField& f)
{
  const int N = op.n_dofs();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(N);
  if (op.orders().ko >= 2) {
    const int nm = op.n_moments();
    Eigen::VectorXd r(nm);
    for (int i = 0; i < nm; ++i)
      r[i] = op.quadrature().integrate(
          [&](const Eigen::Vector2d& x) { return f(x) * op.basis().eval(i, x); });
    Eigen::VectorXd c = op.mass().topLeftCorner(nm, nm).ldlt().solve(r);
    int moment0 = op.n_vertices() * op.orders().kb;
    for (int i = 0; i < nm; ++i) b[moment0 + i] = op.area() * c[i];
    return b;
  }
  // k_o = 1: (int_E f) times the boundary average of the hat traces.
  double intf = op.quadrature().integrate(f);
  const auto& edges = op.edges();
  int nv = op.n_vertices();
  for (int i = 0; i < nv; ++i) {
    double half_sum = 0.5 * (edges[i].length + edges[(i + nv - 1) % nv].length);
    b[i] = intf * half_sum / op.perimeter();
  }
  return b;
}

double consistency_residual(const ElementOperators& op, const Eigen::VectorXd& poly_coeffs,
                            int n_samples, unsigned rng_seed)
{
  // a_h(q, .) realized through the projector ...
  Eigen::RowVectorXd lhs = poly_coeffs.transpose() * op.grad_gram() * op.pi_nabla();
  // ... against a(q, .) from DoF data by integration by parts.
  Eigen::RowVectorXd rhs = poly_coeffs.transpose() * op.ibp_matrix() * op.embed();

  std::mt19937 rng(rng_seed);
  std::normal_distribution<double> dist;
  double worst = 0.0;
  double scale = std::max(lhs.norm(), rhs.norm());
  if (scale == 0.0) scale = 1.0;
  for (int s = 0; s < n_samples; ++s) {
    Eigen::VectorXd v(op.n_dofs());
    for (int i = 0; i < v.size(); ++i) v[i] = dist(rng);
    worst = std::max(worst, std::abs(((lhs - rhs) * v).value()) / (scale * v.norm()));
  }
  return worst;
}

Eigen::VectorXd constant_dof_vector(const ElementOperators& op)
{
  const int N = op.n_dofs();
  Eigen::VectorXd one = Eigen::VectorXd::Zero(N);
  int moment0 = op.n_vertices() * op.orders().kb;
  for (int i = 0; i < moment0; ++i) one[i] = 1.0;
  for (int i = 0; i < op.n_moments(); ++i)
    one[moment0 + i] = op.monomial_integral(i) / op.area();
  return one;
}

} // namespace vempoly
