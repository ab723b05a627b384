#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vempoly/forms.hpp>
#include <vempoly/manufactured.hpp>
#include <vempoly/mesh.hpp>

#include "oracles.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

using namespace vempoly;

namespace {

Polygon unit_square()
{
  return {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
}

Polygon random_star_polygon(std::mt19937_64& rng)
{
  std::uniform_int_distribution<int> nv(3, 10);
  std::uniform_real_distribution<double> rad(0.15, 0.45);
  int n = nv(rng);
  Polygon p;
  for (int i = 0; i < n; ++i) {
    double a = 2.0 * M_PI * (i + 0.3 * rad(rng)) / n;
    p.push_back(Eigen::Vector2d(0.5, 0.5) + rad(rng) * Eigen::Vector2d(std::cos(a), std::sin(a)));
  }
  return p;
}

Polygon translate(const Polygon& p, const Eigen::Vector2d& t)
{
  Polygon out = p;
  for (auto& v : out) v += t;
  return out;
}

Polygon scale(const Polygon& p, double lambda)
{
  Polygon out = p;
  for (auto& v : out) v *= lambda;
  return out;
}

void check_kernel_is_constants(const Eigen::MatrixXd& K, const ElementOperators& op)
{
  Eigen::VectorXd one = constant_dof_vector(op);
  double scale = K.cwiseAbs().maxCoeff();
  CHECK((K * one).cwiseAbs().maxCoeff() < 1e-10 * std::max(1.0, scale));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (K + K.transpose()));
  // PSD with a one-dimensional kernel.
  CHECK(eig.eigenvalues()[0] > -1e-12 * std::max(1.0, scale));
  CHECK(std::abs(eig.eigenvalues()[0]) < 1e-10 * std::max(1.0, scale));
  CHECK(eig.eigenvalues()[1] > 1e-12 * scale);
}

} // namespace

TEST_CASE("stabilization names round trip")
{
  for (auto kind : {StabilizationKind::DofiDofi, StabilizationKind::DofiDofiLight,
                    StabilizationKind::Trace})
    CHECK(parse_stabilization(stabilization_name(kind)) == kind);
  CHECK_THROWS_AS(parse_stabilization("nope"), std::invalid_argument);
}

TEST_CASE("consistency matrix: k=(1,1) exactness of linear forms")
{
  ElementOperators op(unit_square(), Orders(1, 1));
  Eigen::MatrixXd Kc = consistency_matrix(op);
  // Action on DoFs of x against DoFs of x: int |grad x|^2 = 1.
  Eigen::VectorXd dx = op.interpolate([](const Eigen::Vector2d& p) { return p.x(); });
  CHECK(dx.transpose() * Kc * dx == doctest::Approx(1.0).epsilon(1e-12));
  Eigen::VectorXd dy = op.interpolate([](const Eigen::Vector2d& p) { return p.y(); });
  CHECK(dx.transpose() * Kc * dy == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("consistency matrix: quadratic form equals exact gradient pairing for polynomials")
{
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    Polygon poly = random_star_polygon(rng);
    for (int ko = 1; ko <= 3; ++ko) {
      ElementOperators op(poly, Orders(ko, 1));
      Eigen::MatrixXd Kc = op.pi_nabla_enlarged().transpose() * op.grad_gram() *
                           op.pi_nabla_enlarged();
      // Feed exact polynomial DoFs (enlarged): quadratic form = int grad q . grad p.
      for (int a = 0; a < op.n_poly(); ++a)
        for (int b = 0; b < op.n_poly(); ++b) {
          double got = op.dof_matrix_enlarged().col(a).transpose() * Kc *
                       op.dof_matrix_enlarged().col(b);
          CHECK(got == doctest::Approx(op.grad_gram()(a, b)).epsilon(1e-9).scale(1.0));
        }
    }
  }
}

TEST_CASE("consistency matrix is PSD on random polygons")
{
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 5; ++trial) {
    Polygon poly = random_star_polygon(rng);
    ElementOperators op(poly, Orders(3, 1));
    Eigen::MatrixXd Kc = consistency_matrix(op);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (Kc + Kc.transpose()));
    CHECK(eig.eigenvalues()[0] > -1e-12 * Kc.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("dofi stabilization vanishes on polynomial deltas and constants")
{
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    Polygon poly = random_star_polygon(rng);
    for (int ko = 1; ko <= 3; ++ko)
      for (int kb = 1; kb <= ko; ++kb) {
        ElementOperators op(poly, Orders(ko, kb));
        // Enlarged DoFs of a degree-ko polynomial: (I - D Pi) annihilates them.
        Eigen::MatrixXd M = op.dof_matrix_enlarged() * op.pi_nabla_enlarged() -
                            Eigen::MatrixXd::Identity(op.n_enlarged_dofs(), op.n_enlarged_dofs());
        for (int b = 0; b < op.n_poly(); ++b) {
          Eigen::VectorXd delta = M * op.dof_matrix_enlarged().col(b);
          CHECK(delta.squaredNorm() < 1e-20);
        }
        // Constants through the true DoF path (rounding-level zero).
        Eigen::MatrixXd S = stab_dofi(op, false);
        Eigen::VectorXd one = constant_dof_vector(op);
        CHECK(one.transpose() * S * one < 1e-13 * std::max(1.0, S.cwiseAbs().maxCoeff()));
      }
  }
}

TEST_CASE("full and light dofi variants differ but are both PSD, k=(2,1)")
{
  ElementOperators op(unit_square(), Orders(2, 1));
  Eigen::MatrixXd Sfull = stab_dofi(op, false);
  Eigen::MatrixXd Slight = stab_dofi(op, true);
  CHECK((Sfull - Slight).cwiseAbs().maxCoeff() > 1e-6);
  for (const auto& S : {Sfull, Slight}) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (S + S.transpose()));
    CHECK(eig.eigenvalues()[0] > -1e-12);
  }
  // For ko == kb the enlarged node set is the true one: variants coincide.
  ElementOperators op22(unit_square(), Orders(2, 2));
  CHECK((stab_dofi(op22, false) - stab_dofi(op22, true)).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("trace stabilization: hat-vector value on the unit square")
{
  ElementOperators op(unit_square(), Orders(1, 1));
  Eigen::MatrixXd S = stab_trace(op);
  // Hand computation: Pi(hat at (0,0)) = 1/4 - m1/h - m2/h, so the edge-wise
  // tangential defects are constant and each edge contributes 1/4.
  Eigen::VectorXd hat = Eigen::VectorXd::Unit(4, 0);
  CHECK(hat.transpose() * S * hat == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("trace stabilization vanishes on polynomial deltas")
{
  std::mt19937_64 rng(8);
  Polygon poly = random_star_polygon(rng);
  ElementOperators op(poly, Orders(2, 2));
  Eigen::MatrixXd S = stab_trace(op);
  for (int b = 0; b < op.n_poly(); ++b) {
    Eigen::VectorXd dofs = op.dof_matrix().col(b); // kb = ko: exact DoFs
    CHECK(dofs.transpose() * S * dofs < 1e-16 * std::max(1.0, dofs.squaredNorm()));
  }
}

TEST_CASE("trace stabilization is scale invariant at k=(1,1)")
{
  std::mt19937_64 rng(9);
  Polygon poly = random_star_polygon(rng);
  Eigen::MatrixXd S1 = stab_trace(ElementOperators(poly, Orders(1, 1)));
  for (double lambda : {0.5, 2.0}) {
    Eigen::MatrixXd S2 = stab_trace(ElementOperators(scale(poly, lambda), Orders(1, 1)));
    CHECK((S1 - S2).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("element stiffness: kernel is exactly the constant DoF vector")
{
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 10; ++trial) {
    Polygon poly = random_star_polygon(rng);
    for (auto kind : {StabilizationKind::DofiDofi, StabilizationKind::DofiDofiLight,
                      StabilizationKind::Trace}) {
      ElementOperators op(poly, Orders(3, 2));
      check_kernel_is_constants(element_stiffness(op, kind), op);
    }
  }
}

TEST_CASE("element stiffness: symmetry and translation invariance")
{
  std::mt19937_64 rng(11);
  Polygon poly = random_star_polygon(rng);
  for (auto kind : {StabilizationKind::DofiDofi, StabilizationKind::Trace}) {
    ElementOperators op(poly, Orders(2, 1));
    Eigen::MatrixXd K = element_stiffness(op, kind);
    CHECK((K - K.transpose()).cwiseAbs().maxCoeff() < 1e-12 * K.cwiseAbs().maxCoeff());

    ElementOperators moved(translate(poly, {12.3, -4.5}), Orders(2, 1));
    Eigen::MatrixXd Km = element_stiffness(moved, kind);
    CHECK((K - Km).cwiseAbs().maxCoeff() < 1e-11 * K.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("consistency part is scale invariant (2D Poisson)")
{
  std::mt19937_64 rng(12);
  Polygon poly = random_star_polygon(rng);
  ElementOperators op(poly, Orders(3, 2));
  Eigen::MatrixXd Kc = consistency_matrix(op);
  for (double lambda : {0.5, 2.0}) {
    ElementOperators ops(scale(poly, lambda), Orders(3, 2));
    Eigen::MatrixXd Kcs = consistency_matrix(ops);
    CHECK((Kc - Kcs).cwiseAbs().maxCoeff() < 1e-11 * Kc.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("row sums vanish for ko <= 2, where the all-ones vector is DoF(1)")
{
  std::mt19937_64 rng(13);
  Polygon poly = random_star_polygon(rng);
  for (int ko = 1; ko <= 2; ++ko) {
    ElementOperators op(poly, Orders(ko, 1));
    Eigen::MatrixXd K = element_stiffness(op, StabilizationKind::DofiDofi);
    CHECK(K.rowwise().sum().cwiseAbs().maxCoeff() < 1e-10 * K.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("ko-consistency residual is at rounding level")
{
  std::mt19937_64 rng(14);
  std::normal_distribution<double> dist;
  int checked = 0;
  for (int trial = 0; trial < 20; ++trial) {
    Polygon poly = random_star_polygon(rng);
    for (int ko = 1; ko <= 4; ++ko)
      for (int kb = 1; kb <= ko; ++kb) {
        ElementOperators op(poly, Orders(ko, kb));
        Eigen::VectorXd q(op.n_poly());
        for (int i = 0; i < q.size(); ++i) q[i] = dist(rng);
        CHECK(consistency_residual(op, q, 10, trial) < 1e-10);
        ++checked;
      }
  }
  CHECK(checked == 20 * 10);
}

TEST_CASE("ko-consistency: constants give zero on both sides")
{
  ElementOperators op(unit_square(), Orders(2, 1));
  Eigen::VectorXd q = Eigen::VectorXd::Zero(op.n_poly());
  q[0] = 3.0;
  CHECK(consistency_residual(op, q) < 1e-14);
}

TEST_CASE("ko-consistency on a 20-gon at top degree")
{
  Polygon poly;
  for (int i = 0; i < 20; ++i) {
    double a = 2.0 * M_PI * i / 20;
    poly.push_back(Eigen::Vector2d(0.5, 0.5) + 0.4 * Eigen::Vector2d(std::cos(a), std::sin(a)));
  }
  ElementOperators op(poly, Orders(3, 1));
  Eigen::VectorXd q = Eigen::VectorXd::Zero(op.n_poly());
  q[MonomialBasis::index(3, 0)] = 1.0;
  q[MonomialBasis::index(1, 2)] = -0.7;
  CHECK(consistency_residual(op, q) < 1e-10);
}

TEST_CASE("load vector: constant source at ko=2 hits only the first moment")
{
  ElementOperators op(unit_square(), Orders(2, 1));
  Eigen::VectorXd b = load_vector(op, [](const Eigen::Vector2d&) { return 1.0; });
  for (int i = 0; i < 4; ++i) CHECK(std::abs(b[i]) < 1e-14);
  CHECK(b[4] == doctest::Approx(1.0).epsilon(1e-13)); // |E| * 1
}

TEST_CASE("load vector: constant source at ko=1 gives the quarter rule on the square")
{
  ElementOperators op(unit_square(), Orders(1, 1));
  Eigen::VectorXd b = load_vector(op, [](const Eigen::Vector2d&) { return 1.0; });
  for (int i = 0; i < 4; ++i) CHECK(b[i] == doctest::Approx(0.25).epsilon(1e-13));
}

TEST_CASE("load vector: moments of the benchmark source match a dense oracle")
{
  // Mesh-scale element: the default rule is sized for element integrals, not
  // for the whole domain in one cell.
  Polygon cell = {{0.25, 0.5}, {0.5, 0.5}, {0.5, 0.75}, {0.25, 0.75}};
  ElementOperators op(cell, Orders(3, 1));
  Solution sol = benchmark_solution();
  Eigen::VectorXd b = load_vector(op, sol.f);
  // b[moment_j] = |E| c_j with H c = r, r_j = int f m_j: rebuild r from b and
  // compare against the 40x40 tensor-Gauss oracle.
  int nm = op.n_moments();
  Eigen::VectorXd c = b.segment(4, nm) / op.area();
  Eigen::VectorXd r = op.mass().topLeftCorner(nm, nm) * c;
  for (int j = 0; j < nm; ++j) {
    double oracle = testing::tensor_gauss_box(
        [&](const Eigen::Vector2d& x) { return sol.f(x) * op.basis().eval(j, x); },
        {0.25, 0.5}, {0.5, 0.75}, 40);
    CHECK(std::abs(r[j] - oracle) <= 1e-9);
  }
}

TEST_CASE("stabilization kernel/PSD sweep over 200 random elements")
{
  std::mt19937_64 rng(2718);
  int count = 0;
  while (count < 200) {
    Polygon poly = random_star_polygon(rng);
    int ko = 1 + static_cast<int>(rng() % 4);
    int kb = 1 + static_cast<int>(rng() % ko);
    ElementOperators op(poly, Orders(ko, kb));
    auto kind = std::array{StabilizationKind::DofiDofi, StabilizationKind::DofiDofiLight,
                           StabilizationKind::Trace}[count % 3];
    check_kernel_is_constants(element_stiffness(op, kind), op);
    ++count;
  }
}
