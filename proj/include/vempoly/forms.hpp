#pragma once

#include <vempoly/vemspace.hpp>

#include <Eigen/Dense>
#include <string>

namespace vempoly {

enum class StabilizationKind {
  DofiDofi,      // DoF dot product in the enlarged order-k_o space
  DofiDofiLight, // boundary evaluations reduced to the true (k_o,k_b) nodes
  Trace,         // h_E-weighted tangential-derivative boundary integral
};

StabilizationKind parse_stabilization(const std::string& name);
std::string stabilization_name(StabilizationKind kind);

/// Consistency part a(Pi u, Pi v) of the local bilinear form.
Eigen::MatrixXd consistency_matrix(const ElementOperators& op);

/// dofi-dofi stabilization on the non-projected part, S(u,v) = ubar . vbar,
/// with ubar the DoFs of (I - Pi)u in the enlarged space (light = true keeps
/// only the (k_o,k_b) DoFs).
Eigen::MatrixXd stab_dofi(const ElementOperators& op, bool light);

/// trace stabilization h_E int_bE d_s[(I-Pi)u] d_s[(I-Pi)v] ds.
Eigen::MatrixXd stab_trace(const ElementOperators& op);

Eigen::MatrixXd stabilization_matrix(const ElementOperators& op, StabilizationKind kind);

/// K_E = consistency + multiplier * stabilization (multiplier defaults to 1,
/// the plain forms used throughout).
Eigen::MatrixXd element_stiffness(const ElementOperators& op, StabilizationKind kind,
                                  double multiplier = 1.0);

/// Local load vector: for k_o >= 2 the moments of the projected load, for
/// k_o = 1 the cell-average source paired with boundary means.
Eigen::VectorXd load_vector(const ElementOperators& op, const ScalarField& f);

/// k_o-consistency residual: discrete form with a polynomial argument against
/// the same pairing computed by integration by parts from DoF data, maximised
/// over random DoF vectors. Relative; ~1e-15 for a correct build.
double consistency_residual(const ElementOperators& op, const Eigen::VectorXd& poly_coeffs,
                            int n_samples = 20, unsigned rng_seed = 0);

/// DoF vector of the constant function 1 (its higher moments are the means of
/// the monomials, not zero).
Eigen::VectorXd constant_dof_vector(const ElementOperators& op);

} // namespace vempoly
