#include <vempoly/quadrature1d.hpp>

#include <cassert>
#include <cmath>

namespace vempoly {

namespace {

// Legendre polynomial P_n and derivative at x, by the three-term recurrence.
std::pair<double, double> legendre(int n, double x)
{
  double p0 = 1.0, p1 = x;
  if (n == 0) return {1.0, 0.0};
  for (int k = 2; k <= n; ++k) {
    double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  double dp = n * (x * p1 - p0) / (x * x - 1.0);
  return {p1, dp};
}

} // namespace

Rule1D gauss_legendre(int n)
{
  assert(n >= 1);
  Rule1D rule;
  rule.points.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    // Chebyshev initial guess, refined by Newton on P_n.
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 64; ++it) {
      auto [p, dp] = legendre(n, x);
      double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    auto [p, dp] = legendre(n, x);
    (void)p;
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.points[n - 1 - i] = 0.5 * (x + 1.0);
    rule.weights[n - 1 - i] = 0.5 * w;
  }
  return rule;
}

Rule1D gauss_for_degree(int degree)
{
  int n = degree / 2 + 1;
  return gauss_legendre(n);
}

Rule1D gauss_lobatto(int n)
{
  assert(n >= 2);
  Rule1D rule;
  rule.points.resize(n);
  rule.weights.resize(n);
  rule.points[0] = 0.0;
  rule.points[n - 1] = 1.0;
  int m = n - 1; // interior nodes are the roots of P_m'
  for (int i = 1; i < n - 1; ++i) {
    double x = std::cos(M_PI * i / m); // guess, descending in x
    for (int it = 0; it < 64; ++it) {
      auto [p, dp] = legendre(m, x);
      // Newton on P_m'; P_m'' from the Legendre ODE.
      double ddp = (2.0 * x * dp - m * (m + 1) * p) / (1.0 - x * x);
      double dx = dp / ddp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.points[n - 1 - i] = 0.5 * (x + 1.0);
  }
  // Enforce exact point symmetry; shared edge nodes depend on it.
  for (int i = 0; i < n / 2; ++i) {
    double t = 0.5 * (rule.points[i] + 1.0 - rule.points[n - 1 - i]);
    rule.points[i] = t;
    rule.points[n - 1 - i] = 1.0 - t;
  }
  if (n % 2 == 1) rule.points[n / 2] = 0.5;
  for (int i = 0; i < n; ++i) {
    double x = 2.0 * rule.points[i] - 1.0;
    auto [p, dp] = legendre(m, x);
    (void)dp;
    rule.weights[i] = 0.5 * 2.0 / (m * (m + 1) * p * p);
  }
  return rule;
}

Eigen::VectorXd lobatto_interior(int k)
{
  assert(k >= 1);
  if (k == 1) return Eigen::VectorXd();
  Rule1D rule = gauss_lobatto(k + 1);
  return rule.points.segment(1, k - 1);
}

} // namespace vempoly
