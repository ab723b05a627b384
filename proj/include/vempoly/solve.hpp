#pragma once

#include <vempoly/forms.hpp>
#include <vempoly/vemspace.hpp>

#include <Eigen/Sparse>
#include <optional>
#include <string>
#include <vector>

namespace vempoly {

/// Assembled global system on the full DoF set, before boundary conditions.
struct AssembledSystem {
  Eigen::SparseMatrix<double> A;
  Eigen::VectorXd b;
};

/// Schur-complement data of one element: boundary-type block plus the affine
/// recovery of the eliminated moments, u_i = rec_rhs - rec_mat * u_b.
struct ElementCondensation {
  Eigen::MatrixXd K_hat;
  Eigen::VectorXd b_hat;
  Eigen::MatrixXd rec_mat;
  Eigen::VectorXd rec_rhs;
};

struct SolveStats {
  std::string method;          // "direct" or "pcg"
  int free_dofs = 0;
  int iterations = 0;
  double residual = 0.0;
  std::vector<double> residual_history; // pcg only
};

struct SolveOptions {
  StabilizationKind stab = StabilizationKind::DofiDofi;
  double stab_multiplier = 1.0;
  double tol = 1e-12;
  bool condense = false;
  int direct_threshold = 20000; // free DoFs beyond this go to PCG
};

/// Sums local stiffness/load contributions in element order.
AssembledSystem assemble(const PolyMesh& mesh, const DofLayout& layout,
                         const std::vector<ElementOperators>& ops, StabilizationKind stab,
                         const ScalarField& f, double stab_multiplier = 1.0);

/// Splits DoFs into free and Dirichlet-constrained; boundary values are g at
/// the DoF nodes. Returns the reduced SPD system and the lifting data.
struct ReducedSystem {
  Eigen::SparseMatrix<double> A;
  Eigen::VectorXd b;
  std::vector<int> free_index;   // reduced -> global
  Eigen::VectorXd full_values;   // boundary values filled, free slots zero
};
ReducedSystem apply_dirichlet(const AssembledSystem& sys, const DofLayout& layout,
                              const ScalarField& g);

ElementCondensation condense_element(const Eigen::MatrixXd& K, const Eigen::VectorXd& b,
                                     int n_boundary_type);

/// Direct LDL^T for small systems, Jacobi-preconditioned CG otherwise.
/// Throws on PCG stagnation, reporting the residual history.
Eigen::VectorXd solve_spd(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& b,
                          double tol, SolveStats* stats = nullptr, int direct_threshold = 20000);

struct SolveResult {
  Eigen::VectorXd u; // all global DoFs
  SolveStats stats;
};

/// End-to-end Poisson solve with Dirichlet data g and load f.
SolveResult solve_poisson(const PolyMesh& mesh, const DofLayout& layout,
                          const std::vector<ElementOperators>& ops, const ScalarField& f,
                          const ScalarField& g, const SolveOptions& options);

} // namespace vempoly
