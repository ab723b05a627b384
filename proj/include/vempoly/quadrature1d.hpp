#pragma once

#include <Eigen/Dense>

namespace vempoly {

/// 1D quadrature rule on the reference interval [0,1].
struct Rule1D {
  Eigen::VectorXd points;
  Eigen::VectorXd weights;
};

/// n-point Gauss-Legendre rule on [0,1]; exact for degree <= 2n-1.
Rule1D gauss_legendre(int n);

/// Gauss-Legendre rule exact for the given polynomial degree.
Rule1D gauss_for_degree(int degree);

/// n-point Gauss-Lobatto rule on [0,1] (endpoints included, n >= 2);
/// exact for degree <= 2n-3.
Rule1D gauss_lobatto(int n);

/// Parameters in (0,1) of the interior nodes of the (k+1)-point
/// Gauss-Lobatto rule: the edge value nodes for boundary degree k.
Eigen::VectorXd lobatto_interior(int k);

} // namespace vempoly
