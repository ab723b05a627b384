#pragma once

#include <vempoly/manufactured.hpp>
#include <vempoly/mesh.hpp>
#include <vempoly/vemspace.hpp>

#include <vector>

namespace vempoly {

/// The two computable H^1-like relative error quantities of the studies:
/// err_bulk compares the projected gradient of u_h with grad u_ex over the
/// elements, err_trace compares tangential derivatives along the mesh
/// skeleton, weighted by the mean diameter of the incident elements.
struct ErrorReport {
  double err_bulk = 0.0;
  double err_trace = 0.0;
  int n_dofs = 0;
  MeshMetrics metrics;
  std::vector<double> element_bulk2; // per-element squared numerator
};

double err_bulk(const PolyMesh& mesh, const DofLayout& layout,
                const std::vector<ElementOperators>& ops, const Eigen::VectorXd& u,
                const Solution& exact, std::vector<double>* element_terms = nullptr);

double err_trace(const PolyMesh& mesh, const MeshTopology& topo, const DofLayout& layout,
                 const std::vector<ElementOperators>& ops, const Eigen::VectorXd& u,
                 const Solution& exact);

ErrorReport compute_errors(const PolyMesh& mesh, const MeshTopology& topo,
                           const DofLayout& layout, const std::vector<ElementOperators>& ops,
                           const Eigen::VectorXd& u, const Solution& exact);

/// Interpolation-error probes of the DoF interpolant: the err_bulk-style
/// quantity of the projected gradient, and the max boundary mismatch of the
/// piecewise-P_kb trace — the two sides of the h^ko / h_bnd^kb splitting.
struct InterpolationProbe {
  double bulk_proxy = 0.0;
  double boundary_linf = 0.0;
};

InterpolationProbe interpolation_probe(const PolyMesh& mesh, const DofLayout& layout,
                                       const std::vector<ElementOperators>& ops,
                                       const Solution& v);

/// Build the global DoF vector that interpolates a smooth field.
Eigen::VectorXd global_interpolant(const PolyMesh& mesh, const DofLayout& layout,
                                   const std::vector<ElementOperators>& ops,
                                   const ScalarField& v);

/// Log-log least-squares slope through (h, error) points.
struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0; // RMS in log space
  int n_points = 0;
};

RateFit fit_rate(const std::vector<std::pair<double, double>>& points);

} // namespace vempoly
