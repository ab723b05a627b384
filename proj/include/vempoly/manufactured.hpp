#pragma once

#include <vempoly/vemspace.hpp>

#include <Eigen/Dense>
#include <array>
#include <vector>

namespace vempoly {

/// Exact solution, gradient and matching Poisson load f = -Lap u.
struct Solution {
  ScalarField u;
  VectorField grad;
  ScalarField f;
};

/// The benchmark solution used by all studies:
/// u(x,y) = x^5 + x^4 y - x y^4 + x^3 - x y - x + y - 1
///          + sin(2 pi x) sin(pi y) + log(x^2 + y^4 + 1).
Solution benchmark_solution();

/// Plain bivariate polynomial sum c_k x^ax y^ay, for patch tests.
class Poly2 {
public:
  Poly2() = default;
  Poly2(std::vector<std::array<double, 3>> terms); // {coeff, ax, ay}

  double operator()(const Eigen::Vector2d& x) const;
  Eigen::Vector2d gradient(const Eigen::Vector2d& x) const;
  double laplacian(const Eigen::Vector2d& x) const;
  int degree() const;

  Solution as_solution() const;

  /// A fixed full-coefficient polynomial of the given degree (entries drawn
  /// from a seeded RNG); handy for patch and reproduction sweeps.
  static Poly2 pseudo_random(int degree, unsigned seed);

private:
  struct Term {
    double c;
    int ax, ay;
  };
  std::vector<Term> m_terms;
};

} // namespace vempoly
