#pragma once

#include <Eigen/Dense>
#include <vector>

namespace vempoly {

/// 1D grid of an interval: strictly increasing breakpoints.
struct Grid1D {
  Eigen::VectorXd breakpoints;

  int n_elements() const { return static_cast<int>(breakpoints.size()) - 1; }
  double length(int e) const { return breakpoints[e + 1] - breakpoints[e]; }
  /// R_h: largest over smallest element length.
  double length_ratio() const;

  static Grid1D uniform(double x0, double x1, int n);
  static Grid1D from_lengths(double x0, const std::vector<double>& lengths);
};

/// Continuous piecewise polynomial of degree <= k on a Grid1D. Coefficients
/// are local monomials in t = (x - x_e)/h_e, one row per element.
struct PiecewisePoly1D {
  Grid1D grid;
  int degree = 1;
  Eigen::MatrixXd coeffs; // n_elements x (degree+1)

  double eval_local(int e, double t) const;
  double eval(double x) const;
  /// Max continuity jump at interior breakpoints (should be ~1e-14).
  double continuity_defect() const;
  /// L-infinity norm on one element: Chebyshev sampling plus local refinement.
  double element_linf(int e) const;

  /// Piecewise linear from values at the breakpoints.
  static PiecewisePoly1D from_node_values(const Grid1D& grid, const Eigen::VectorXd& values);
  /// Degree-k spline from values at the per-element Gauss-Lobatto nodes
  /// (n_elements * k + 1 values, shared at breakpoints).
  static PiecewisePoly1D from_node_samples(const Grid1D& grid, int degree,
                                           const Eigen::VectorXd& values);
};

/// Squared H^{1/2} seminorm: the double integral of (v(x)-v(y))^2/(x-y)^2
/// over the grid interval. Distant element pairs use tensor Gauss, the
/// same-element integrand is an exact polynomial (difference quotient), and
/// adjacent pairs use corner-graded cells refined until two successive Gauss
/// levels agree to rel_tol. Throws if the refinement does not settle.
double h12_seminorm_sq(const PiecewisePoly1D& v, double rel_tol = 1e-8);

/// Optional H^{1/2}_00 weight term: integral of v^2 / dist(x, boundary of I).
/// Finite only when v vanishes at both interval ends.
double h12_00_weight_term(const PiecewisePoly1D& v, double rel_tol = 1e-8);

/// Greedy left-to-right decomposition into quasi-uniform runs with local
/// max/min length ratio <= c_bar; accepted iff at most m_bar runs.
struct PquResult {
  bool accepted = false;
  std::vector<std::pair<int, int>> runs; // [first, last] element index ranges
};
PquResult check_pqu(const Grid1D& grid, int m_bar, double c_bar);

/// |v|^2_{1/2} / (log(1 + R_h) * sum_e ||v||^2_Linf(e)); 0 for constant v.
double lemma_ratio(const PiecewisePoly1D& v);

/// Piecewise linear oscillator on a uniform N-element grid of [0,1]: +1 at
/// odd-index nodes, -1 at even ones. Its squared seminorm scales like N while
/// the edge-wise sup norms sum to N, which is what makes the bound sharp.
PiecewisePoly1D psi_example(int N);

} // namespace vempoly
