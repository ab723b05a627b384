#include <vempoly/h12.hpp>
#include <vempoly/quadrature1d.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace vempoly {

double Grid1D::length_ratio() const
{
  double lo = std::numeric_limits<double>::max(), hi = 0.0;
  for (int e = 0; e < n_elements(); ++e) {
    lo = std::min(lo, length(e));
    hi = std::max(hi, length(e));
  }
  return hi / lo;
}

Grid1D Grid1D::uniform(double x0, double x1, int n)
{
  Grid1D g;
  g.breakpoints = Eigen::VectorXd::LinSpaced(n + 1, x0, x1);
  return g;
}

Grid1D Grid1D::from_lengths(double x0, const std::vector<double>& lengths)
{
  Grid1D g;
  g.breakpoints.resize(lengths.size() + 1);
  g.breakpoints[0] = x0;
  for (size_t i = 0; i < lengths.size(); ++i)
    g.breakpoints[i + 1] = g.breakpoints[i] + lengths[i];
  return g;
}

//------------------------------------------------------------------------------
// PiecewisePoly1D
//------------------------------------------------------------------------------

double PiecewisePoly1D::eval_local(int e, double t) const
{
  double v = 0.0;
  for (int m = degree; m >= 0; --m) v = v * t + coeffs(e, m);
  return v;
}

double PiecewisePoly1D::eval(double x) const
{
  const auto& bp = grid.breakpoints;
  int lo = 0, hi = grid.n_elements() - 1;
  while (lo < hi) {
    int mid = (lo + hi + 1) / 2;
    if (x >= bp[mid]) lo = mid;
    else hi = mid - 1;
  }
  return eval_local(lo, (x - bp[lo]) / grid.length(lo));
}

double PiecewisePoly1D::continuity_defect() const
{
  double worst = 0.0;
  for (int e = 0; e + 1 < grid.n_elements(); ++e)
    worst = std::max(worst, std::abs(eval_local(e, 1.0) - eval_local(e + 1, 0.0)));
  return worst;
}

double PiecewisePoly1D::element_linf(int e) const
{
  int n_samples = 16 * (degree + 1);
  double best = 0.0, best_t = 0.0;
  for (int i = 0; i <= n_samples; ++i) {
    double t = 0.5 - 0.5 * std::cos(M_PI * i / n_samples);
    double v = std::abs(eval_local(e, t));
    if (v > best) {
      best = v;
      best_t = t;
    }
  }
  // Local refinement around the best sample.
  double gap = 1.0 / n_samples;
  double a = std::max(0.0, best_t - gap), b = std::min(1.0, best_t + gap);
  for (int it = 0; it < 60; ++it) {
    double t1 = a + (b - a) / 3.0, t2 = b - (b - a) / 3.0;
    if (std::abs(eval_local(e, t1)) < std::abs(eval_local(e, t2))) a = t1;
    else b = t2;
  }
  return std::max(best, std::abs(eval_local(e, 0.5 * (a + b))));
}

PiecewisePoly1D PiecewisePoly1D::from_node_values(const Grid1D& grid, const Eigen::VectorXd& values)
{
  if (values.size() != grid.breakpoints.size())
    throw std::invalid_argument("from_node_values: one value per breakpoint required");
  PiecewisePoly1D v;
  v.grid = grid;
  v.degree = 1;
  v.coeffs.resize(grid.n_elements(), 2);
  for (int e = 0; e < grid.n_elements(); ++e) {
    v.coeffs(e, 0) = values[e];
    v.coeffs(e, 1) = values[e + 1] - values[e];
  }
  return v;
}

PiecewisePoly1D PiecewisePoly1D::from_node_samples(const Grid1D& grid, int degree,
                                                   const Eigen::VectorXd& values)
{
  int ne = grid.n_elements();
  if (values.size() != ne * degree + 1)
    throw std::invalid_argument("from_node_samples: need n_elements*degree + 1 values");
  Rule1D lob = gauss_lobatto(degree + 1);
  Eigen::MatrixXd vand(degree + 1, degree + 1);
  for (int i = 0; i <= degree; ++i)
    for (int j = 0; j <= degree; ++j) vand(i, j) = std::pow(lob.points[i], j);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(vand);

  PiecewisePoly1D v;
  v.grid = grid;
  v.degree = degree;
  v.coeffs.resize(ne, degree + 1);
  for (int e = 0; e < ne; ++e) {
    Eigen::VectorXd local = values.segment(e * degree, degree + 1);
    v.coeffs.row(e) = lu.solve(local).transpose();
  }
  return v;
}

//------------------------------------------------------------------------------
// Seminorm
//------------------------------------------------------------------------------

namespace {

// Same-element contribution: the difference quotient of a polynomial is a
// polynomial, so the integral is exact with k Gauss points per direction.
double same_element_term(const PiecewisePoly1D& v, int e)
{
  int k = v.degree;
  if (k == 0) return 0.0;
  Rule1D g = gauss_legendre(std::max(1, k));
  double total = 0.0;
  for (int qi = 0; qi < g.points.size(); ++qi)
    for (int qj = 0; qj < g.points.size(); ++qj) {
      double tx = g.points[qi], ty = g.points[qj];
      // q(tx,ty) = sum_m c_m (tx^m - ty^m)/(tx - ty), expanded term-wise.
      double q = 0.0;
      for (int m = 1; m <= k; ++m) {
        double hm = 0.0;
        for (int a = 0; a < m; ++a) hm += std::pow(tx, a) * std::pow(ty, m - 1 - a);
        q += v.coeffs(e, m) * hm;
      }
      total += g.weights[qi] * g.weights[qj] * q * q;
    }
  return total; // h_e^2 from dx dy cancels against (x-y)^2 scaling
}

// Distant pair: the integrand is analytic but the kernel scale is the gap,
// not the element length. Bisect until every piece is no longer than its
// distance to the other piece, then tensor Gauss is spectrally sharp.
double distant_piece_term(const PiecewisePoly1D& v, const Rule1D& g, int i, int j, double ax,
                          double bx, double ay, double by)
{
  double gap = ay - bx; // piece of j lies right of piece of i
  if (bx - ax > gap && bx - ax >= by - ay)
    return distant_piece_term(v, g, i, j, ax, 0.5 * (ax + bx), ay, by) +
           distant_piece_term(v, g, i, j, 0.5 * (ax + bx), bx, ay, by);
  if (by - ay > gap)
    return distant_piece_term(v, g, i, j, ax, bx, ay, 0.5 * (ay + by)) +
           distant_piece_term(v, g, i, j, ax, bx, 0.5 * (ay + by), by);

  double xi = v.grid.breakpoints[i], hi = v.grid.length(i);
  double xj = v.grid.breakpoints[j], hj = v.grid.length(j);
  double total = 0.0;
  for (int qi = 0; qi < g.points.size(); ++qi) {
    double x = ax + g.points[qi] * (bx - ax);
    double vx = v.eval_local(i, (x - xi) / hi);
    for (int qj = 0; qj < g.points.size(); ++qj) {
      double y = ay + g.points[qj] * (by - ay);
      double vy = v.eval_local(j, (y - xj) / hj);
      double r = (vx - vy) / (x - y);
      total += g.weights[qi] * g.weights[qj] * (bx - ax) * (by - ay) * r * r;
    }
  }
  return total;
}

double distant_pair_term(const PiecewisePoly1D& v, int i, int j)
{
  Rule1D g = gauss_legendre(v.degree + 6);
  return distant_piece_term(v, g, i, j, v.grid.breakpoints[i], v.grid.breakpoints[i + 1],
                            v.grid.breakpoints[j], v.grid.breakpoints[j + 1]);
}

// Difference quotients against the shared node, as stable polynomials:
// alpha(s) with a(u) = p_i(1 - s), u = s*h_i: (a(0)-a(u))/u,
// beta(tau) with b(w) = p_j(tau), w = tau*h_j: (b(w)-b(0))/w.
double quotient_from_right_end(const PiecewisePoly1D& v, int e, double s, double h)
{
  double z = 1.0 - s;
  double sum = 0.0;
  for (int m = 1; m <= v.degree; ++m) {
    double psi = 0.0, zp = 1.0;
    for (int r = 0; r < m; ++r) {
      psi += zp;
      zp *= z;
    }
    sum += v.coeffs(e, m) * psi;
  }
  return sum / h;
}

double quotient_from_left_end(const PiecewisePoly1D& v, int e, double tau, double h)
{
  double sum = 0.0, tp = 1.0;
  for (int m = 1; m <= v.degree; ++m) {
    sum += v.coeffs(e, m) * tp;
    tp *= tau;
  }
  return sum / h;
}

// Adjacent pair e_i, e_{i+1}: corner-graded dyadic cells in the distances
// (u, w) from the shared node, tensor Gauss per cell. The integrand
// ((u a + w b)/(u+w))^2 is bounded; only the corner needs grading.
double adjacent_pair_level(const PiecewisePoly1D& v, int i, int n_gauss)
{
  constexpr int M = 26;
  Rule1D g = gauss_legendre(n_gauss);
  double hi = v.grid.length(i), hj = v.grid.length(i + 1);

  auto cell_bounds = [](double h, int level) -> std::pair<double, double> {
    if (level == M) return {0.0, h * std::pow(0.5, M)};
    return {h * std::pow(0.5, level + 1), h * std::pow(0.5, level)};
  };

  double total = 0.0;
  for (int lu = 0; lu <= M; ++lu) {
    auto [u0, u1] = cell_bounds(hi, lu);
    for (int lw = 0; lw <= M; ++lw) {
      auto [w0, w1] = cell_bounds(hj, lw);
      double cell = 0.0;
      for (int qi = 0; qi < g.points.size(); ++qi) {
        double u = u0 + g.points[qi] * (u1 - u0);
        double alpha = quotient_from_right_end(v, i, u / hi, hi);
        for (int qj = 0; qj < g.points.size(); ++qj) {
          double w = w0 + g.points[qj] * (w1 - w0);
          double beta = quotient_from_left_end(v, i + 1, w / hj, hj);
          double r = (u * alpha + w * beta) / (u + w);
          cell += g.weights[qi] * g.weights[qj] * r * r;
        }
      }
      total += cell * (u1 - u0) * (w1 - w0);
    }
  }
  return total;
}

double adjacent_pair_term(const PiecewisePoly1D& v, int i, double rel_tol)
{
  double prev = adjacent_pair_level(v, i, 4);
  for (int n_gauss : {6, 8, 12, 16, 24}) {
    double cur = adjacent_pair_level(v, i, n_gauss);
    if (std::abs(cur - prev) <= rel_tol * std::max(std::abs(cur), 1e-300)) return cur;
    prev = cur;
  }
  throw std::runtime_error("h12_seminorm: adjacent-pair refinement did not converge");
}

} // namespace

double h12_seminorm_sq(const PiecewisePoly1D& v, double rel_tol)
{
  int ne = v.grid.n_elements();
  double total = 0.0;
  for (int i = 0; i < ne; ++i) total += same_element_term(v, i);
  for (int i = 0; i + 1 < ne; ++i) total += 2.0 * adjacent_pair_term(v, i, rel_tol);
  for (int i = 0; i < ne; ++i)
    for (int j = i + 2; j < ne; ++j) total += 2.0 * distant_pair_term(v, i, j);
  return total;
}

double h12_00_weight_term(const PiecewisePoly1D& v, double rel_tol)
{
  (void)rel_tol;
  constexpr int M = 40;
  double x0 = v.grid.breakpoints[0];
  double x1 = v.grid.breakpoints[v.grid.n_elements()];
  double mid = 0.5 * (x0 + x1);
  Rule1D g = gauss_legendre(std::max(v.degree + 4, 16));

  // Composite integral of v^2 / rho with rho the distance to the nearer
  // interval end; cells are split at element breakpoints, the midpoint, and
  // dyadically toward the two ends.
  std::vector<double> cuts(v.grid.breakpoints.data(),
                           v.grid.breakpoints.data() + v.grid.breakpoints.size());
  cuts.push_back(mid);
  double len = x1 - x0;
  for (int l = 1; l <= M; ++l) {
    cuts.push_back(x0 + len * std::pow(0.5, l + 1));
    cuts.push_back(x1 - len * std::pow(0.5, l + 1));
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(),
                         [&](double a, double b) { return std::abs(a - b) < 1e-300; }),
             cuts.end());

  double total = 0.0;
  for (size_t c = 0; c + 1 < cuts.size(); ++c) {
    double a = cuts[c], b = cuts[c + 1];
    if (b - a <= 0.0) continue;
    for (int q = 0; q < g.points.size(); ++q) {
      double x = a + g.points[q] * (b - a);
      double rho = std::min(x - x0, x1 - x);
      double val = v.eval(x);
      total += g.weights[q] * (b - a) * val * val / rho;
    }
  }
  return total;
}

//------------------------------------------------------------------------------
// PQU decomposition, lemma ratio, sharpness example
//------------------------------------------------------------------------------

PquResult check_pqu(const Grid1D& grid, int m_bar, double c_bar)
{
  PquResult res;
  int ne = grid.n_elements();
  int first = 0;
  double lo = grid.length(0), hi = grid.length(0);
  for (int e = 1; e < ne; ++e) {
    double nlo = std::min(lo, grid.length(e));
    double nhi = std::max(hi, grid.length(e));
    if (nhi / nlo <= c_bar * (1.0 + 1e-12)) {
      lo = nlo;
      hi = nhi;
    } else {
      res.runs.emplace_back(first, e - 1);
      first = e;
      lo = hi = grid.length(e);
    }
  }
  res.runs.emplace_back(first, ne - 1);
  res.accepted = static_cast<int>(res.runs.size()) <= m_bar;
  return res;
}

double lemma_ratio(const PiecewisePoly1D& v)
{
  double sum_linf2 = 0.0;
  for (int e = 0; e < v.grid.n_elements(); ++e) {
    double m = v.element_linf(e);
    sum_linf2 += m * m;
  }
  double semi = h12_seminorm_sq(v);
  if (semi < 1e-12 * std::max(sum_linf2, 1e-30)) return 0.0;
  return semi / (std::log(1.0 + v.grid.length_ratio()) * sum_linf2);
}

PiecewisePoly1D psi_example(int N)
{
  if (N < 2) throw std::invalid_argument("psi_example: N must be >= 2");
  Grid1D grid = Grid1D::uniform(0.0, 1.0, N);
  Eigen::VectorXd values(N + 1);
  for (int i = 0; i <= N; ++i) values[i] = (i % 2 == 1) ? 1.0 : -1.0;
  return PiecewisePoly1D::from_node_values(grid, values);
}

} // namespace vempoly
