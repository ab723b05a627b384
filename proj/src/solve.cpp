#include <vempoly/solve.hpp>
#include <vempoly/parallel.hpp>

#include <Eigen/SparseCholesky>

#include <sstream>
#include <stdexcept>

namespace vempoly {

AssembledSystem assemble(const PolyMesh& mesh, const DofLayout& layout,
                         const std::vector<ElementOperators>& ops, StabilizationKind stab,
                         const ScalarField& f, double stab_multiplier)
{
  const int ne = mesh.n_elements();
  std::vector<Eigen::MatrixXd> K(ne);
  std::vector<Eigen::VectorXd> b(ne);
  parallel_for(ne, [&](std::size_t start, std::size_t end) {
    for (std::size_t e = start; e < end; ++e) {
      try {
        K[e] = element_stiffness(ops[e], stab, stab_multiplier);
        b[e] = load_vector(ops[e], f);
      } catch (const std::exception& err) {
        throw std::runtime_error("element " + std::to_string(e) + ": " + err.what());
      }
    }
  });

  AssembledSystem sys;
  sys.b = Eigen::VectorXd::Zero(layout.n_global);
  std::vector<Eigen::Triplet<double>> trip;
  std::size_t nnz = 0;
  for (int e = 0; e < ne; ++e) nnz += layout.element_dofs[e].size() * layout.element_dofs[e].size();
  trip.reserve(nnz);
  for (int e = 0; e < ne; ++e) {
    const auto& dofs = layout.element_dofs[e];
    for (size_t i = 0; i < dofs.size(); ++i) {
      sys.b[dofs[i]] += b[e][i];
      for (size_t j = 0; j < dofs.size(); ++j)
        trip.emplace_back(dofs[i], dofs[j], K[e](i, j));
    }
  }
  sys.A.resize(layout.n_global, layout.n_global);
  sys.A.setFromTriplets(trip.begin(), trip.end());
  return sys;
}

namespace {

ReducedSystem reduce_system(const AssembledSystem& sys, const DofLayout& layout,
                            const ScalarField& g, const std::vector<char>* active)
{
  const int n = layout.n_global;
  ReducedSystem red;
  red.full_values = Eigen::VectorXd::Zero(n);
  std::vector<int> to_reduced(n, -1);
  for (int i = 0; i < n; ++i) {
    if (active && !(*active)[i]) continue;
    if (layout.is_boundary_dof[i]) {
      red.full_values[i] = g(layout.dof_point[i]);
    } else {
      to_reduced[i] = static_cast<int>(red.free_index.size());
      red.free_index.push_back(i);
    }
  }
  const int nf = static_cast<int>(red.free_index.size());
  red.b = Eigen::VectorXd::Zero(nf);
  for (int k = 0; k < nf; ++k) red.b[k] = sys.b[red.free_index[k]];

  std::vector<Eigen::Triplet<double>> trip;
  for (int col = 0; col < sys.A.outerSize(); ++col) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(sys.A, col); it; ++it) {
      int i = static_cast<int>(it.row());
      int j = col;
      if (to_reduced[i] < 0) continue;
      if (to_reduced[j] >= 0)
        trip.emplace_back(to_reduced[i], to_reduced[j], it.value());
      else if (layout.is_boundary_dof[j])
        red.b[to_reduced[i]] -= it.value() * red.full_values[j];
    }
  }
  red.A.resize(nf, nf);
  red.A.setFromTriplets(trip.begin(), trip.end());
  return red;
}

} // namespace

ReducedSystem apply_dirichlet(const AssembledSystem& sys, const DofLayout& layout,
                              const ScalarField& g)
{
  return reduce_system(sys, layout, g, nullptr);
}

ElementCondensation condense_element(const Eigen::MatrixXd& K, const Eigen::VectorXd& b,
                                     int n_boundary_type)
{
  const int n = static_cast<int>(K.rows());
  const int ni = n - n_boundary_type;
  ElementCondensation c;
  if (ni == 0) {
    c.K_hat = K;
    c.b_hat = b;
    c.rec_mat.resize(0, n_boundary_type);
    c.rec_rhs.resize(0);
    return c;
  }
  auto Kbb = K.topLeftCorner(n_boundary_type, n_boundary_type);
  auto Kbi = K.topRightCorner(n_boundary_type, ni);
  auto Kib = K.bottomLeftCorner(ni, n_boundary_type);
  auto Kii = K.bottomRightCorner(ni, ni);
  Eigen::LDLT<Eigen::MatrixXd> ldlt(Kii);
  if (ldlt.info() != Eigen::Success)
    throw std::runtime_error("condense_element: interior moment block is singular");
  c.rec_mat = ldlt.solve(Kib);
  c.rec_rhs = ldlt.solve(b.tail(ni));
  c.K_hat = Kbb - Kbi * c.rec_mat;
  c.b_hat = b.head(n_boundary_type) - Kbi * c.rec_rhs;
  return c;
}

Eigen::VectorXd solve_spd(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& b,
                          double tol, SolveStats* stats, int direct_threshold)
{
  const int n = static_cast<int>(A.rows());
  SolveStats local;
  local.free_dofs = n;
  if (n == 0) {
    if (stats) *stats = local;
    return Eigen::VectorXd();
  }

  if (n <= direct_threshold) {
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> chol(A);
    if (chol.info() != Eigen::Success)
      throw std::runtime_error("solve_spd: factorization failed (matrix not SPD?)");
    Eigen::VectorXd x = chol.solve(b);
    local.method = "direct";
    double bn = b.norm();
    local.residual = bn > 0 ? (A * x - b).norm() / bn : 0.0;
    if (stats) *stats = local;
    return x;
  }

  // Jacobi-preconditioned conjugate gradients.
  local.method = "pcg";
  Eigen::VectorXd inv_diag(n);
  for (int i = 0; i < n; ++i) {
    double d = A.coeff(i, i);
    inv_diag[i] = d > 0 ? 1.0 / d : 1.0;
  }
  double bnorm = b.norm();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  if (bnorm == 0.0) {
    if (stats) *stats = local;
    return x;
  }
  Eigen::VectorXd r = b;
  Eigen::VectorXd z = inv_diag.asDiagonal() * r;
  Eigen::VectorXd p = z;
  double rz = r.dot(z);
  const int maxit = std::max(1000, 10 * n);
  int it = 0;
  for (; it < maxit; ++it) {
    local.residual_history.push_back(r.norm() / bnorm);
    if (local.residual_history.back() <= tol) break;
    Eigen::VectorXd Ap = A * p;
    double alpha = rz / p.dot(Ap);
    x += alpha * p;
    r -= alpha * Ap;
    z = inv_diag.asDiagonal() * r;
    double rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  local.iterations = it;
  local.residual = (A * x - b).norm() / bnorm;
  if (local.residual > tol * 10 && it >= maxit) {
    std::ostringstream os;
    os << "solve_spd: PCG did not converge after " << it << " iterations, residual "
       << local.residual << "; history tail:";
    for (size_t k = local.residual_history.size() > 8 ? local.residual_history.size() - 8 : 0;
         k < local.residual_history.size(); ++k)
      os << " " << local.residual_history[k];
    throw std::runtime_error(os.str());
  }
  if (stats) *stats = local;
  return x;
}

SolveResult solve_poisson(const PolyMesh& mesh, const DofLayout& layout,
                          const std::vector<ElementOperators>& ops, const ScalarField& f,
                          const ScalarField& g, const SolveOptions& options)
{
  const int ne = mesh.n_elements();
  SolveResult result;

  if (!options.condense) {
    AssembledSystem sys = assemble(mesh, layout, ops, options.stab, f, options.stab_multiplier);
    ReducedSystem red = apply_dirichlet(sys, layout, g);
    SolveStats stats;
    Eigen::VectorXd xf = solve_spd(red.A, red.b, options.tol, &stats, options.direct_threshold);
    result.u = red.full_values;
    for (size_t k = 0; k < red.free_index.size(); ++k) result.u[red.free_index[k]] = xf[k];
    result.stats = stats;
    return result;
  }

  // Static condensation: eliminate the element moments before assembly.
  std::vector<ElementCondensation> cond(ne);
  parallel_for(ne, [&](std::size_t start, std::size_t end) {
    for (std::size_t e = start; e < end; ++e) {
      Eigen::MatrixXd K = element_stiffness(ops[e], options.stab, options.stab_multiplier);
      Eigen::VectorXd b = load_vector(ops[e], f);
      int n_bnd = ops[e].n_dofs() - ops[e].n_moments();
      cond[e] = condense_element(K, b, n_bnd);
    }
  });

  AssembledSystem sys;
  sys.b = Eigen::VectorXd::Zero(layout.n_global);
  std::vector<Eigen::Triplet<double>> trip;
  std::vector<char> active(layout.n_global, 0);
  for (int e = 0; e < ne; ++e) {
    const auto& dofs = layout.element_dofs[e];
    int nb = static_cast<int>(cond[e].K_hat.rows());
    for (int i = 0; i < nb; ++i) {
      active[dofs[i]] = 1;
      sys.b[dofs[i]] += cond[e].b_hat[i];
      for (int j = 0; j < nb; ++j) trip.emplace_back(dofs[i], dofs[j], cond[e].K_hat(i, j));
    }
  }
  sys.A.resize(layout.n_global, layout.n_global);
  sys.A.setFromTriplets(trip.begin(), trip.end());

  ReducedSystem red = reduce_system(sys, layout, g, &active);
  SolveStats stats;
  Eigen::VectorXd xf = solve_spd(red.A, red.b, options.tol, &stats, options.direct_threshold);
  result.u = red.full_values;
  for (size_t k = 0; k < red.free_index.size(); ++k) result.u[red.free_index[k]] = xf[k];

  // Recover the eliminated moments element by element.
  for (int e = 0; e < ne; ++e) {
    const auto& dofs = layout.element_dofs[e];
    int nb = static_cast<int>(cond[e].K_hat.rows());
    int ni = static_cast<int>(cond[e].rec_rhs.size());
    if (ni == 0) continue;
    Eigen::VectorXd ub(nb);
    for (int i = 0; i < nb; ++i) ub[i] = result.u[dofs[i]];
    Eigen::VectorXd ui = cond[e].rec_rhs - cond[e].rec_mat * ub;
    for (int i = 0; i < ni; ++i) result.u[dofs[nb + i]] = ui[i];
  }
  result.stats = stats;
  return result;
}

} // namespace vempoly
