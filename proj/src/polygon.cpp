#include <vempoly/polygon.hpp>
#include <vempoly/quadrature1d.hpp>

#include <cmath>
#include <stdexcept>

namespace vempoly {

double polygon_signed_area(const Polygon& p)
{
  double a = 0.0;
  size_t n = p.size();
  for (size_t i = 0; i < n; ++i) {
    const auto& u = p[i];
    const auto& v = p[(i + 1) % n];
    a += u.x() * v.y() - v.x() * u.y();
  }
  return 0.5 * a;
}

Eigen::Vector2d polygon_centroid(const Polygon& p)
{
  double a = 0.0;
  Eigen::Vector2d c = Eigen::Vector2d::Zero();
  size_t n = p.size();
  for (size_t i = 0; i < n; ++i) {
    const auto& u = p[i];
    const auto& v = p[(i + 1) % n];
    double cross = u.x() * v.y() - v.x() * u.y();
    a += cross;
    c += cross * (u + v);
  }
  return c / (3.0 * a);
}

double polygon_diameter(const Polygon& p)
{
  double d2 = 0.0;
  for (size_t i = 0; i < p.size(); ++i)
    for (size_t j = i + 1; j < p.size(); ++j)
      d2 = std::max(d2, (p[i] - p[j]).squaredNorm());
  return std::sqrt(d2);
}

double polygon_perimeter(const Polygon& p)
{
  double s = 0.0;
  for (size_t i = 0; i < p.size(); ++i) s += (p[(i + 1) % p.size()] - p[i]).norm();
  return s;
}

namespace {

double cross2(const Eigen::Vector2d& o, const Eigen::Vector2d& a, const Eigen::Vector2d& b)
{
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

bool point_in_triangle(const Eigen::Vector2d& q, const Eigen::Vector2d& a,
                       const Eigen::Vector2d& b, const Eigen::Vector2d& c, double eps)
{
  double d1 = cross2(a, b, q);
  double d2 = cross2(b, c, q);
  double d3 = cross2(c, a, q);
  return d1 > -eps && d2 > -eps && d3 > -eps;
}

} // namespace

std::vector<std::array<Eigen::Vector2d, 3>> triangulate(const Polygon& p)
{
  if (p.size() < 3) throw std::runtime_error("triangulate: polygon with fewer than 3 vertices");
  double scale2 = 0.0;
  for (const auto& v : p)
    for (const auto& w : p) scale2 = std::max(scale2, (v - w).squaredNorm());
  const double eps = 1e-13 * scale2;

  // Work list of vertices; collinear ones removed as zero-area ears.
  std::vector<Eigen::Vector2d> v(p.begin(), p.end());
  std::vector<std::array<Eigen::Vector2d, 3>> tris;
  tris.reserve(v.size() - 2);

  while (v.size() > 3) {
    size_t n = v.size();
    bool clipped = false;
    // Prefer removing collinear vertices: free simplification.
    for (size_t i = 0; i < n; ++i) {
      const auto& a = v[(i + n - 1) % n];
      const auto& b = v[i];
      const auto& c = v[(i + 1) % n];
      if (std::abs(cross2(a, b, c)) <= eps) {
        v.erase(v.begin() + i);
        clipped = true;
        break;
      }
    }
    if (clipped) continue;
    for (size_t i = 0; i < n; ++i) {
      const auto& a = v[(i + n - 1) % n];
      const auto& b = v[i];
      const auto& c = v[(i + 1) % n];
      if (cross2(a, b, c) <= eps) continue; // reflex corner, not an ear
      bool blocked = false;
      for (size_t j = 0; j < n && !blocked; ++j) {
        if (j == (i + n - 1) % n || j == i || j == (i + 1) % n) continue;
        if (point_in_triangle(v[j], a, b, c, eps)) blocked = true;
      }
      if (blocked) continue;
      tris.push_back({a, b, c});
      v.erase(v.begin() + i);
      clipped = true;
      break;
    }
    if (!clipped) throw std::runtime_error("triangulate: no ear found (degenerate or non-simple polygon)");
  }
  if (std::abs(cross2(v[0], v[1], v[2])) > eps) tris.push_back({v[0], v[1], v[2]});
  if (tris.empty()) throw std::runtime_error("triangulate: polygon has zero area");
  return tris;
}

Quadrature2D polygon_quadrature(const Polygon& p, int degree)
{
  auto tris = triangulate(p);
  // Collapsed-square map x = a + s(b-a) + st(c-b): the Jacobian 2|T|s raises
  // the s-degree by one, so n Gauss points per direction need 2n-1 >= deg+1.
  int n = (degree + 3) / 2;
  Rule1D g = gauss_legendre(n);

  Quadrature2D quad;
  quad.degree = degree;
  Eigen::Index total = static_cast<Eigen::Index>(tris.size()) * n * n;
  quad.points.resize(total, 2);
  quad.weights.resize(total);

  Eigen::Index k = 0;
  for (const auto& t : tris) {
    const Eigen::Vector2d& a = t[0];
    const Eigen::Vector2d& b = t[1];
    const Eigen::Vector2d& c = t[2];
    double area2 = cross2(a, b, c); // = 2|T|
    for (int i = 0; i < n; ++i) {
      double s = g.points[i];
      for (int j = 0; j < n; ++j) {
        double u = g.points[j];
        Eigen::Vector2d x = a + s * (b - a) + s * u * (c - b);
        quad.points.row(k) = x.transpose();
        quad.weights[k] = g.weights[i] * g.weights[j] * area2 * s;
        ++k;
      }
    }
  }
  return quad;
}

} // namespace vempoly
