#include <vempoly/errors.hpp>
#include <vempoly/parallel.hpp>
#include <vempoly/quadrature1d.hpp>

#include <cmath>
#include <stdexcept>

namespace vempoly {

namespace {

// Local DoF values of a global vector on one element.
Eigen::VectorXd restrict_local(const DofLayout& layout, int e, const Eigen::VectorXd& u)
{
  const auto& dofs = layout.element_dofs[e];
  Eigen::VectorXd ul(dofs.size());
  for (size_t i = 0; i < dofs.size(); ++i) ul[i] = u[dofs[i]];
  return ul;
}

} // namespace

double err_bulk(const PolyMesh& mesh, const DofLayout& layout,
                const std::vector<ElementOperators>& ops, const Eigen::VectorXd& u,
                const Solution& exact, std::vector<double>* element_terms)
{
  const int ne = mesh.n_elements();
  std::vector<double> num(ne, 0.0), den(ne, 0.0);
  parallel_for(ne, [&](std::size_t start, std::size_t end) {
    for (std::size_t e = start; e < end; ++e) {
      const ElementOperators& op = ops[e];
      Eigen::VectorXd ul = restrict_local(layout, static_cast<int>(e), u);
      Eigen::VectorXd cx = op.pi0_grad_x() * ul;
      Eigen::VectorXd cy = op.pi0_grad_y() * ul;
      // Slight over-integration: u_ex is not polynomial.
      Quadrature2D quad = polygon_quadrature(op.polygon(), 2 * op.orders().ko + 4);
      MonomialBasis bkm1(op.centroid(), op.diameter(), op.orders().ko - 1);
      for (Eigen::Index q = 0; q < quad.weights.size(); ++q) {
        Eigen::Vector2d x(quad.points(q, 0), quad.points(q, 1));
        Eigen::VectorXd vals = bkm1.eval_all(x);
        Eigen::Vector2d gh(vals.dot(cx), vals.dot(cy));
        Eigen::Vector2d g = exact.grad(x);
        num[e] += quad.weights[q] * (g - gh).squaredNorm();
        den[e] += quad.weights[q] * g.squaredNorm();
      }
    }
  });
  double num_sum = 0.0, den_sum = 0.0;
  for (int e = 0; e < ne; ++e) {
    num_sum += num[e];
    den_sum += den[e];
  }
  if (element_terms) *element_terms = num;
  return std::sqrt(num_sum / den_sum);
}

double err_trace(const PolyMesh& mesh, const MeshTopology& topo, const DofLayout& layout,
                 const std::vector<ElementOperators>& ops, const Eigen::VectorXd& u,
                 const Solution& exact)
{
  const int kb = layout.orders.kb;
  Eigen::VectorXd params(kb + 1);
  params[0] = 0.0;
  params[kb] = 1.0;
  Eigen::VectorXd interior = lobatto_interior(kb);
  for (int j = 0; j < kb - 1; ++j) params[1 + j] = interior[j];
  Rule1D rule = gauss_for_degree(2 * kb + 2);

  double num = 0.0, den = 0.0;
  for (int e = 0; e < topo.n_edges(); ++e) {
    const auto& edge = topo.edges[e];
    double H_e = 0.0;
    for (int s = 0; s < edge.n_incident; ++s) H_e += ops[edge.elem[s]].diameter();
    H_e /= edge.n_incident;

    Eigen::Vector2d pa = mesh.vertices[edge.a], pb = mesh.vertices[edge.b];
    double len = (pb - pa).norm();
    Eigen::Vector2d tangent = (pb - pa) / len;

    // Edge trace DoFs in canonical order: endpoint a, interior nodes, endpoint b.
    Eigen::VectorXd trace_vals(kb + 1);
    trace_vals[0] = u[edge.a];
    trace_vals[kb] = u[edge.b];
    for (int j = 0; j < kb - 1; ++j) trace_vals[1 + j] = u[layout.edge_dof_start(e) + j];

    for (Eigen::Index q = 0; q < rule.points.size(); ++q) {
      double t = rule.points[q];
      double w = rule.weights[q] * len;
      Eigen::Vector2d x = pa + t * (pb - pa);
      double ds_uh = lagrange_derivatives(params, t).dot(trace_vals) / len;
      double ds_uex = exact.grad(x).dot(tangent);
      num += H_e * w * (ds_uex - ds_uh) * (ds_uex - ds_uh);
      den += H_e * w * ds_uex * ds_uex;
    }
  }
  return std::sqrt(num / den);
}

ErrorReport compute_errors(const PolyMesh& mesh, const MeshTopology& topo,
                           const DofLayout& layout, const std::vector<ElementOperators>& ops,
                           const Eigen::VectorXd& u, const Solution& exact)
{
  ErrorReport report;
  report.err_bulk = err_bulk(mesh, layout, ops, u, exact, &report.element_bulk2);
  report.err_trace = err_trace(mesh, topo, layout, ops, u, exact);
  report.n_dofs = layout.n_global;
  report.metrics = compute_metrics(mesh);
  return report;
}

Eigen::VectorXd global_interpolant(const PolyMesh& mesh, const DofLayout& layout,
                                   const std::vector<ElementOperators>& ops,
                                   const ScalarField& v)
{
  Eigen::VectorXd u = Eigen::VectorXd::Zero(layout.n_global);
  for (int e = 0; e < mesh.n_elements(); ++e) {
    Eigen::VectorXd ul = ops[e].interpolate(v);
    const auto& dofs = layout.element_dofs[e];
    for (size_t i = 0; i < dofs.size(); ++i) u[dofs[i]] = ul[i];
  }
  return u;
}

InterpolationProbe interpolation_probe(const PolyMesh& mesh, const DofLayout& layout,
                                       const std::vector<ElementOperators>& ops,
                                       const Solution& v)
{
  InterpolationProbe probe;
  Eigen::VectorXd vi = global_interpolant(mesh, layout, ops, v.u);
  probe.bulk_proxy = err_bulk(mesh, layout, ops, vi, v);

  const int kb = layout.orders.kb;
  Rule1D rule = gauss_for_degree(2 * kb + 2);
  double worst = 0.0;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    for (const auto& ed : ops[e].edges()) {
      Eigen::VectorXd nodal(ed.node_params.size());
      for (Eigen::Index j = 0; j < ed.node_params.size(); ++j)
        nodal[j] = v.u(ed.a + ed.node_params[j] * (ed.b - ed.a));
      for (Eigen::Index q = 0; q < rule.points.size(); ++q) {
        double t = rule.points[q];
        Eigen::Vector2d x = ed.a + t * (ed.b - ed.a);
        double vb = lagrange_values(ed.node_params, t).dot(nodal);
        worst = std::max(worst, std::abs(v.u(x) - vb));
      }
    }
  }
  probe.boundary_linf = worst;
  return probe;
}

RateFit fit_rate(const std::vector<std::pair<double, double>>& points)
{
  if (points.size() < 3) throw std::invalid_argument("fit_rate: need at least 3 points");
  for (const auto& [h, err] : points)
    if (!(h > 0.0) || !(err > 0.0))
      throw std::invalid_argument("fit_rate: points must be strictly positive");

  const int n = static_cast<int>(points.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [h, err] : points) {
    double x = std::log(h), y = std::log(err);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  RateFit fit;
  fit.n_points = n;
  fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  fit.intercept = (sy - fit.slope * sx) / n;
  double ss = 0.0;
  for (const auto& [h, err] : points) {
    double r = std::log(err) - (fit.intercept + fit.slope * std::log(h));
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

} // namespace vempoly
