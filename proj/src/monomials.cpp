#include <vempoly/monomials.hpp>

#include <cassert>
#include <cmath>

namespace vempoly {

MonomialBasis::MonomialBasis(const Eigen::Vector2d& center, double h, int degree)
  : m_center(center), m_h(h), m_degree(degree)
{
  assert(h > 0.0);
  assert(degree >= 0);
}

std::pair<int, int> MonomialBasis::exponents(int i)
{
  // degree d of index i: dim(d-1) <= i < dim(d), with dim(d-1) = d(d+1)/2
  int d = static_cast<int>((std::sqrt(8.0 * i + 1.0) - 1.0) / 2.0);
  while (dim(d) <= i) ++d;
  while (d > 0 && dim(d - 1) > i) --d;
  int ay = i - d * (d + 1) / 2;
  return {d - ay, ay};
}

double MonomialBasis::eval(int i, const Eigen::Vector2d& x) const
{
  auto [ax, ay] = exponents(i);
  double sx = (x.x() - m_center.x()) / m_h;
  double sy = (x.y() - m_center.y()) / m_h;
  return std::pow(sx, ax) * std::pow(sy, ay);
}

Eigen::Vector2d MonomialBasis::grad(int i, const Eigen::Vector2d& x) const
{
  auto [ax, ay] = exponents(i);
  double sx = (x.x() - m_center.x()) / m_h;
  double sy = (x.y() - m_center.y()) / m_h;
  double gx = ax == 0 ? 0.0 : ax * std::pow(sx, ax - 1) * std::pow(sy, ay) / m_h;
  double gy = ay == 0 ? 0.0 : ay * std::pow(sx, ax) * std::pow(sy, ay - 1) / m_h;
  return {gx, gy};
}

Eigen::VectorXd MonomialBasis::eval_all(const Eigen::Vector2d& x) const
{
  int n = size();
  Eigen::VectorXd out(n);
  double sx = (x.x() - m_center.x()) / m_h;
  double sy = (x.y() - m_center.y()) / m_h;
  // Fill degree by degree: within degree d, value(ax,ay) = sx^ax * sy^ay.
  for (int i = 0; i < n; ++i) {
    auto [ax, ay] = exponents(i);
    out[i] = std::pow(sx, ax) * std::pow(sy, ay);
  }
  return out;
}

Eigen::Matrix<double, Eigen::Dynamic, 2> MonomialBasis::grad_all(const Eigen::Vector2d& x) const
{
  int n = size();
  Eigen::Matrix<double, Eigen::Dynamic, 2> out(n, 2);
  for (int i = 0; i < n; ++i) out.row(i) = grad(i, x).transpose();
  return out;
}

std::vector<std::pair<int, double>> MonomialBasis::dx_coeffs(int i) const
{
  auto [ax, ay] = exponents(i);
  if (ax == 0) return {};
  return {{index(ax - 1, ay), ax / m_h}};
}

std::vector<std::pair<int, double>> MonomialBasis::dy_coeffs(int i) const
{
  auto [ax, ay] = exponents(i);
  if (ay == 0) return {};
  return {{index(ax, ay - 1), ay / m_h}};
}

std::vector<std::pair<int, double>> MonomialBasis::laplacian_coeffs(int i) const
{
  auto [ax, ay] = exponents(i);
  std::vector<std::pair<int, double>> out;
  if (ax >= 2) out.emplace_back(index(ax - 2, ay), ax * (ax - 1) / (m_h * m_h));
  if (ay >= 2) out.emplace_back(index(ax, ay - 2), ay * (ay - 1) / (m_h * m_h));
  return out;
}

} // namespace vempoly
