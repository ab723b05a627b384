#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

namespace vempoly {

using Polygon = std::vector<Eigen::Vector2d>;

double polygon_signed_area(const Polygon& p);
Eigen::Vector2d polygon_centroid(const Polygon& p);
double polygon_diameter(const Polygon& p);
double polygon_perimeter(const Polygon& p);

/// Triangulates a simple CCW polygon by ear clipping. Collinear vertices are
/// dropped first (they do not change the point set), so subdivided and
/// agglomerated elements triangulate at their true geometric complexity.
/// Throws std::runtime_error if no ear can be found (non-simple input).
std::vector<std::array<Eigen::Vector2d, 3>> triangulate(const Polygon& p);

/// Quadrature on a polygon, exact for bivariate polynomials up to `degree`.
struct Quadrature2D {
  Eigen::Matrix<double, Eigen::Dynamic, 2> points;
  Eigen::VectorXd weights;
  int degree = 0;

  template <class F>
  double integrate(F&& f) const
  {
    double s = 0.0;
    for (Eigen::Index q = 0; q < weights.size(); ++q)
      s += weights[q] * f(Eigen::Vector2d(points(q, 0), points(q, 1)));
    return s;
  }
};

/// Ear-clip triangulation x collapsed tensor Gauss rule on each triangle.
Quadrature2D polygon_quadrature(const Polygon& p, int degree);

} // namespace vempoly
