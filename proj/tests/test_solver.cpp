#include <gtest/gtest.h>

#include <cmath>

#include "pctl/verify.hpp"
#include "support.hpp"

using namespace pctl;

namespace {

Vector random_vector(std::size_t n, std::uint64_t seed) {
  SplitMix64 rng(seed);
  Vector v(n);
  for (double& x : v) x = rng.uniform(-1.0, 1.0);
  return v;
}

double rel_residual(const SparseSym& a, const Vector& b, const Vector& x) {
  Vector r = spmv(a, x);
  axpy(-1.0, b, r);
  return norm2(r) / norm2(b);
}

Eigen::VectorXd as_eigen(const Vector& v) { return Eigen::Map<const Eigen::VectorXd>(v.data(), v.size()); }

FvProblemConfig fv(std::size_t grid) {
  FvProblemConfig c;
  c.grid = grid;
  return c;
}

}  // namespace

TEST(Interpolation, ScalarAndDecoupled) {
  const Hierarchy h(test::reference_instance());
  EXPECT_DOUBLE_EQ(h.interpolation().w_r[0], 0.5);
  EXPECT_DOUBLE_EQ(h.interpolation().w_i[0], 0.5);
  const Hierarchy d(test::decoupled_identity(4));
  for (double w : d.interpolation().w_r) EXPECT_EQ(w, 0.0);
}

TEST(Interpolation, TwoByTwo) {
  ThreeTMatrix m;
  m.n = 2;
  m.radiation = SparseSym::from_lower(2, std::vector<Triplet>{{0, 0, 2.0}, {1, 0, -0.5}, {1, 1, 2.0}});
  m.ion = SparseSym::identity(2);
  m.electron = SparseSym::diagonal(Vector{5.0, 5.0});
  m.rad_exchange = {-1.0, -1.0};
  m.ion_exchange = {0.0, 0.0};
  const Hierarchy h(m);
  for (double w : h.interpolation().w_r) {
    EXPECT_NEAR(w, 2.0 / 3.0, 1e-15);
    EXPECT_LT(w, 1.0);
  }
}

TEST(Interpolation, SolvesIdealConstraint) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto m = test::random_synthetic(2 + s % 4, s);
    const Hierarchy h(m);
    EXPECT_TRUE(interpolation_constraint_holds(m, h.interpolation(), 1e-12));
  }
}

TEST(CoarseOperator, ScalarEqualsSchurComplement) {
  const Hierarchy h(test::reference_instance());
  EXPECT_DOUBLE_EQ(h.coarse().at(0, 0), 2.0);
  const Hierarchy d(test::decoupled_identity(3));
  EXPECT_EQ(d.coarse(), SparseSym::identity(3));
}

TEST(CoarseOperator, MatchesDenseGalerkinProduct) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto m = test::random_synthetic(2 + s % 3, 50 + s);
    const Hierarchy h(m);
    const auto op = dense_operators(m, h.interpolation());
    const Eigen::MatrixXd ref = op.p.transpose() * op.a * op.p;
    EXPECT_LE((to_dense(h.coarse()) - ref).cwiseAbs().maxCoeff(), 1e-12 * ref.cwiseAbs().maxCoeff());
    // pattern within the union of the block patterns
    for (std::size_t i = 0; i < m.n; ++i)
      for (std::size_t j : h.coarse().row_cols(i))
        EXPECT_TRUE(m.electron.has(i, j) || m.radiation.has(i, j) || m.ion.has(i, j));
  }
}

TEST(Smoothing, ScalarPreSmoothTrace) {
  const Hierarchy h(test::reference_instance());
  Vector x = {1.0, 1.0, 1.0};
  pre_smooth(h, Vector{0, 0, 0}, x);
  EXPECT_DOUBLE_EQ(x[2], 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(x[0], 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(x[1], 1.0 / 3.0);
}

TEST(Smoothing, LastSolvedBlocksAreExact) {
  const auto m = test::random_synthetic(4, 8);
  const Hierarchy h(m);
  const Vector b = random_vector(3 * m.n, 1);
  Vector x = random_vector(3 * m.n, 2);
  pre_smooth(h, b, x);
  Vector r = b;
  axpy(-1.0, spmv(h.assembled(), x), r);
  for (std::size_t k = 0; k < 2 * m.n; ++k) EXPECT_LE(std::abs(r[k]), 1e-12 * norm2(b));
  post_smooth(h, b, x);
  r = b;
  axpy(-1.0, spmv(h.assembled(), x), r);
  for (std::size_t k = 2 * m.n; k < 3 * m.n; ++k) EXPECT_LE(std::abs(r[k]), 1e-12 * norm2(b));
}

TEST(Smoothing, ErrorPropagatorsMatchDenseForms) {
  const auto m = test::random_synthetic(2, 21);
  const Hierarchy h(m);
  const auto op = dense_operators(m, h.interpolation());
  const auto size = op.a.rows();
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(size, size);
  const Eigen::MatrixXd g1 = eye - op.m.transpose().inverse() * op.a;
  const Eigen::MatrixXd g2 = eye - op.m.inverse() * op.a;
  // G2 is the A-adjoint of G1: A G2 = G1' A
  EXPECT_LE((op.a * g2 - g1.transpose() * op.a).cwiseAbs().maxCoeff(), 1e-12 * op.a.cwiseAbs().maxCoeff());
  const Vector zero(size, 0.0);
  for (std::uint64_t s = 0; s < 3; ++s) {
    Vector e = random_vector(size, s);
    const Eigen::VectorXd e0 = as_eigen(e);
    Vector e2 = e;
    pre_smooth(h, zero, e);
    post_smooth(h, zero, e2);
    EXPECT_LE((as_eigen(e) - g1 * e0).norm(), 1e-12 * e0.norm());
    EXPECT_LE((as_eigen(e2) - g2 * e0).norm(), 1e-12 * e0.norm());
  }
}

TEST(CoarseCorrect, ZeroResidualAndRestriction) {
  const auto m = test::random_synthetic(3, 5);
  const Hierarchy h(m);
  const Vector x0 = random_vector(3 * m.n, 3);
  const Vector b = spmv(h.assembled(), x0);
  Vector x = x0;
  coarse_correct(h, b, x);
  for (std::size_t k = 0; k < x.size(); ++k) EXPECT_NEAR(x[k], x0[k], 1e-12);

  const auto op = dense_operators(m, h.interpolation());
  const Vector rc = restrict_residual(h, b);
  EXPECT_LE((as_eigen(rc) - op.p.transpose() * as_eigen(b)).norm(), 1e-14 * as_eigen(b).norm());
}

TEST(Cycle, DirectSolverCases) {
  std::vector<ThreeTMatrix> cases = {test::reference_instance(), test::decoupled_identity(6)};
  for (std::uint64_t s = 0; s < 5; ++s) cases.push_back(test::random_scalar_instance(s));
  for (const auto& m : cases) {
    const Hierarchy h(m);
    const Vector b = random_vector(3 * m.n, 7);
    Vector x = random_vector(3 * m.n, 8);
    pctl_cycle(h, b, x);
    EXPECT_LE(rel_residual(h.assembled(), b, x), 1e-12);
  }
}

TEST(Cycle, ContractionBelowBound) {
  const Hierarchy h(gen_fv(fv(16)));
  const double kappa_bound = compute_bounds(h).kappa_exact;
  const auto& a = h.assembled();
  Vector e = random_vector(a.size(), 4);
  const Vector zero(a.size(), 0.0);
  for (int c = 0; c < 5; ++c) {
    const double before = a_norm(a, e);
    pctl_cycle(h, zero, e);
    EXPECT_LE(a_norm(a, e), kappa_bound * before * (1.0 + 1e-12));
  }
}

TEST(Stationary, ReferenceOneIterationAndZeroRhs) {
  const Hierarchy h(test::reference_instance());
  const auto res = solve_stationary(h, Vector{1.0, -2.0, 0.5}, Vector(3, 0.0), 1e-10, 10);
  EXPECT_EQ(res.stats.iters, 1u);
  EXPECT_TRUE(res.stats.converged);
  const auto z = solve_stationary(h, Vector(3, 0.0), Vector(3, 0.0), 1e-10, 10);
  EXPECT_EQ(z.stats.iters, 0u);
  EXPECT_TRUE(z.stats.converged);
}

TEST(Stationary, IterationCountMatchesContraction) {
  const Hierarchy h(gen_fv(fv(32)));
  const Vector b = random_vector(3 * h.n(), 9);
  const auto res = solve_stationary(h, b, Vector(b.size(), 0.0), 1e-8, 200);
  ASSERT_TRUE(res.stats.converged);
  EXPECT_LE(rel_residual(h.assembled(), b, res.x), 1e-8);
  const double predicted = std::ceil(std::log(1e-8) / std::log(res.stats.rho_observed));
  EXPECT_LE(std::abs(static_cast<double>(res.stats.iters) - predicted), 2.0);
}

TEST(Stationary, MaxitReportsNotConverged) {
  const Hierarchy h(gen_fv(fv(8)));
  const auto res = solve_stationary(h, Vector(3 * h.n(), 1.0), Vector(3 * h.n(), 0.0), 1e-30, 2);
  EXPECT_FALSE(res.stats.converged);
  EXPECT_EQ(res.stats.iters, 2u);
}

TEST(Stationary, ExactSolutionGivesErrorContraction) {
  const auto m = test::random_synthetic(4, 12);
  const Hierarchy h(m);
  const Vector xs = random_vector(3 * m.n, 1);
  const Vector b = spmv(h.assembled(), xs);
  const auto res = solve_stationary(h, b, Vector(b.size(), 0.0), 1e-10, 100, std::span<const double>(xs));
  EXPECT_TRUE(res.stats.converged);
  EXPECT_LE(res.stats.rho_observed, compute_bounds(h).kappa_exact);
}

TEST(Preconditioner, SymmetricAndLinear) {
  const auto m = test::random_synthetic(3, 31);
  const Hierarchy h(m);
  const std::size_t size = 3 * m.n;
  Eigen::MatrixXd b(size, size);
  for (std::size_t j = 0; j < size; ++j) {
    Vector ej(size, 0.0);
    ej[j] = 1.0;
    b.col(static_cast<Eigen::Index>(j)) = as_eigen(apply_preconditioner(h, ej));
  }
  EXPECT_LE((b - b.transpose()).cwiseAbs().maxCoeff(), 1e-12 * b.cwiseAbs().maxCoeff());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (b + b.transpose()));
  EXPECT_GT(es.eigenvalues().minCoeff(), 0.0);

  Vector e12(size, 0.0), e1(size, 0.0), e2(size, 0.0);
  e1[0] = e12[0] = 1.0;
  e2[1] = e12[1] = 1.0;
  Vector sum = apply_preconditioner(h, e1);
  axpy(1.0, apply_preconditioner(h, e2), sum);
  const Vector direct = apply_preconditioner(h, e12);
  for (std::size_t k = 0; k < size; ++k) EXPECT_NEAR(direct[k], sum[k], 1e-12 * norm2(direct));
}

TEST(Pcg, DecoupledOneIterationAndFewerThanCg) {
  const Hierarchy d(test::decoupled_identity(5));
  EXPECT_EQ(pcg_pctl(d, random_vector(15, 1), 1e-12, 10).stats.iters, 1u);

  const Hierarchy h(gen_fv(fv(32)));
  const Vector b = random_vector(3 * h.n(), 2);
  const auto pc = pcg_pctl(h, b, 1e-8, 500);
  const auto cg = cg_solve(h.assembled(), b, 1e-8, 5000);
  ASSERT_TRUE(pc.stats.converged && cg.stats.converged);
  EXPECT_LT(pc.stats.iters, cg.stats.iters);
}

TEST(Hierarchy, InnerCgMatchesDirect) {
  const auto m = gen_fv(fv(12));
  const Hierarchy direct(m);
  const Hierarchy inner(m, {SubSolve::InnerCg, 1e-13});
  const Vector b = random_vector(3 * m.n, 3);
  Vector x1(b.size(), 0.0), x2(b.size(), 0.0);
  pctl_cycle(direct, b, x1);
  pctl_cycle(inner, b, x2);
  for (std::size_t k = 0; k < b.size(); ++k) EXPECT_NEAR(x1[k], x2[k], 1e-9 * norm2(x1));
}

TEST(Hierarchy, NaturalOrderingMatchesRcm) {
  const auto m = test::random_synthetic(5, 2);
  HierarchyOptions opt;
  opt.ordering = Ordering::Natural;
  const Hierarchy a(m), b(m, opt);
  const Vector r = random_vector(3 * m.n, 4);
  const Vector za = apply_preconditioner(a, r), zb = apply_preconditioner(b, r);
  for (std::size_t k = 0; k < r.size(); ++k) EXPECT_NEAR(za[k], zb[k], 1e-12 * norm2(za));
}

TEST(Hierarchy, NonSpdBlockNamed) {
  auto m = test::reference_instance();
  m.radiation = SparseSym::diagonal(Vector{-2.0});
  EXPECT_THROW(Hierarchy{m}, NotSpdError);
}

TEST(Hierarchy, LengthChecks) {
  const Hierarchy h(test::reference_instance());
  Vector x(2, 0.0);
  EXPECT_THROW(pctl_cycle(h, Vector(3, 1.0), x), DimensionError);
}
