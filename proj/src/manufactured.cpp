#include <vempoly/manufactured.hpp>

#include <cmath>
#include <random>

namespace vempoly {

Solution benchmark_solution()
{
  Solution s;
  s.u = [](const Eigen::Vector2d& p) {
    double x = p.x(), y = p.y();
    return std::pow(x, 5) + std::pow(x, 4) * y - x * std::pow(y, 4) + x * x * x - x * y - x +
           y - 1.0 + std::sin(2.0 * M_PI * x) * std::sin(M_PI * y) +
           std::log(x * x + std::pow(y, 4) + 1.0);
  };
  s.grad = [](const Eigen::Vector2d& p) {
    double x = p.x(), y = p.y();
    double D = x * x + std::pow(y, 4) + 1.0;
    double ux = 5.0 * std::pow(x, 4) + 4.0 * std::pow(x, 3) * y - std::pow(y, 4) +
                3.0 * x * x - y - 1.0 +
                2.0 * M_PI * std::cos(2.0 * M_PI * x) * std::sin(M_PI * y) + 2.0 * x / D;
    double uy = std::pow(x, 4) - 4.0 * x * std::pow(y, 3) - x + 1.0 +
                M_PI * std::sin(2.0 * M_PI * x) * std::cos(M_PI * y) +
                4.0 * std::pow(y, 3) / D;
    return Eigen::Vector2d(ux, uy);
  };
  s.f = [](const Eigen::Vector2d& p) {
    double x = p.x(), y = p.y();
    double D = x * x + std::pow(y, 4) + 1.0;
    double uxx = 20.0 * std::pow(x, 3) + 12.0 * x * x * y + 6.0 * x -
                 4.0 * M_PI * M_PI * std::sin(2.0 * M_PI * x) * std::sin(M_PI * y) +
                 (2.0 * D - 4.0 * x * x) / (D * D);
    double uyy = -12.0 * x * y * y -
                 M_PI * M_PI * std::sin(2.0 * M_PI * x) * std::sin(M_PI * y) +
                 (12.0 * y * y * D - 16.0 * std::pow(y, 6)) / (D * D);
    return -(uxx + uyy);
  };
  return s;
}

Poly2::Poly2(std::vector<std::array<double, 3>> terms)
{
  for (const auto& t : terms)
    m_terms.push_back({t[0], static_cast<int>(t[1]), static_cast<int>(t[2])});
}

double Poly2::operator()(const Eigen::Vector2d& x) const
{
  double s = 0.0;
  for (const auto& t : m_terms) s += t.c * std::pow(x.x(), t.ax) * std::pow(x.y(), t.ay);
  return s;
}

Eigen::Vector2d Poly2::gradient(const Eigen::Vector2d& x) const
{
  Eigen::Vector2d g = Eigen::Vector2d::Zero();
  for (const auto& t : m_terms) {
    if (t.ax > 0) g.x() += t.c * t.ax * std::pow(x.x(), t.ax - 1) * std::pow(x.y(), t.ay);
    if (t.ay > 0) g.y() += t.c * t.ay * std::pow(x.x(), t.ax) * std::pow(x.y(), t.ay - 1);
  }
  return g;
}

double Poly2::laplacian(const Eigen::Vector2d& x) const
{
  double s = 0.0;
  for (const auto& t : m_terms) {
    if (t.ax >= 2)
      s += t.c * t.ax * (t.ax - 1) * std::pow(x.x(), t.ax - 2) * std::pow(x.y(), t.ay);
    if (t.ay >= 2)
      s += t.c * t.ay * (t.ay - 1) * std::pow(x.x(), t.ax) * std::pow(x.y(), t.ay - 2);
  }
  return s;
}

int Poly2::degree() const
{
  int d = 0;
  for (const auto& t : m_terms) d = std::max(d, t.ax + t.ay);
  return d;
}

Solution Poly2::as_solution() const
{
  Solution s;
  Poly2 self = *this;
  s.u = [self](const Eigen::Vector2d& x) { return self(x); };
  s.grad = [self](const Eigen::Vector2d& x) { return self.gradient(x); };
  s.f = [self](const Eigen::Vector2d& x) { return -self.laplacian(x); };
  return s;
}

Poly2 Poly2::pseudo_random(int degree, unsigned seed)
{
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Poly2 p;
  for (int d = 0; d <= degree; ++d)
    for (int ay = 0; ay <= d; ++ay) p.m_terms.push_back({dist(rng), d - ay, ay});
  return p;
}

} // namespace vempoly
