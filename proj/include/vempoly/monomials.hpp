#pragma once

#include <Eigen/Dense>
#include <vector>

namespace vempoly {

/// Scaled monomials m_i(x) = ((x - center)/h)^alpha on an element, graded-lex
/// ordered: (0,0), (1,0), (0,1), (2,0), (1,1), (0,2), ...
/// Derivatives stay inside the family: grad maps degree n to n-1 (scaled by
/// 1/h), the Laplacian to n-2 (scaled by 1/h^2).
class MonomialBasis {
public:
  MonomialBasis(const Eigen::Vector2d& center, double h, int degree);

  static int dim(int degree) { return degree < 0 ? 0 : (degree + 1) * (degree + 2) / 2; }
  static int index(int ax, int ay) { return (ax + ay) * (ax + ay + 1) / 2 + ay; }
  static std::pair<int, int> exponents(int i);

  int degree() const { return m_degree; }
  int size() const { return dim(m_degree); }
  const Eigen::Vector2d& center() const { return m_center; }
  double h() const { return m_h; }

  double eval(int i, const Eigen::Vector2d& x) const;
  Eigen::Vector2d grad(int i, const Eigen::Vector2d& x) const;

  /// Values of all basis functions at x.
  Eigen::VectorXd eval_all(const Eigen::Vector2d& x) const;
  /// Gradients of all basis functions at x (rows: basis index).
  Eigen::Matrix<double, Eigen::Dynamic, 2> grad_all(const Eigen::Vector2d& x) const;

  /// Expansion of d/dx m_i in the basis: single term (index, coeff) or empty.
  std::vector<std::pair<int, double>> dx_coeffs(int i) const;
  std::vector<std::pair<int, double>> dy_coeffs(int i) const;
  /// Expansion of the Laplacian of m_i: up to two terms of degree |i|-2.
  std::vector<std::pair<int, double>> laplacian_coeffs(int i) const;

private:
  Eigen::Vector2d m_center;
  double m_h;
  int m_degree;
};

} // namespace vempoly
