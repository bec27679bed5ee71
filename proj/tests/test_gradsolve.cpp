#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "malsfem/gradsolve.hpp"
#include "malsfem/metrics.hpp"

using namespace malsfem;

namespace {

NewtonConfig default_config() { return NewtonConfig{}; }

Eigen::Matrix2d random_matrix(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  Eigen::Matrix2d a;
  a << u(rng), u(rng), u(rng), u(rng);
  return a;
}

ProblemData unit_source_zero_boundary() {
  ProblemData d;
  d.f = [](const Point&) { return 1.0; };
  d.g = [](const Point&) { return 0.0; };
  d.grad_g = [](const Point&) { return Eigen::Vector2d::Zero().eval(); };
  return d;
}

double symmetry_defect(const SparseMatrix& a) {
  const SparseMatrix d = SparseMatrix(a.transpose()) - a;
  return d.nonZeros() == 0 ? 0.0 : d.coeffs().cwiseAbs().maxCoeff();
}

}  // namespace

TEST(Cofactor, ClosedFormExamples) {
  EXPECT_EQ(cofactor2(Eigen::Matrix2d::Identity().eval()), Eigen::Matrix2d::Identity());
  Eigen::Matrix2d a;
  a << 2, 1, 1, 3;
  Eigen::Matrix2d c;
  c << 3, -1, -1, 2;
  EXPECT_EQ(cofactor2(a), c);
  Jac j;
  j << 2, 1, 1, 3;
  EXPECT_EQ(to_matrix(cofactor2(j)), c);
  EXPECT_DOUBLE_EQ(det2(j), 5.0);
}

TEST(Cofactor, DeterminantExpansionOnRandomPairs) {
  std::mt19937 rng(2024);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Eigen::Matrix2d a = random_matrix(rng);
    const Eigen::Matrix2d b = random_matrix(rng);
    const double lhs = (a + b).determinant();
    const double rhs = a.determinant() + b.determinant() + cofactor2(a).cwiseProduct(b).sum();
    worst = std::max(worst, std::abs(lhs - rhs));
    // In 2D cof(A):A = 2 det A.
    EXPECT_NEAR(cofactor2(a).cwiseProduct(a).sum(), 2 * a.determinant(), 1e-12);
  }
  EXPECT_LT(worst, 1e-12);
}

TEST(NewtonSystem, IdentityLinearizationIsSymmetricPositiveDefinite) {
  const Mesh mesh = Mesh::structured(3);
  const ExampleDef& ex = example("ex1");
  for (int m = 1; m <= 2; ++m) {
    const ReconOp op = build_recon_op(mesh, m, default_patch_size(m));
    const TrialSpace space = TrialSpace::reconstructed(op);
    const PiecewiseField w = space.field(space.interpolate(VectorFn([](const Point& x) { return Eigen::Vector2d(x); })));
    const LinearSystem sys = assemble_newton_system(space, ex.data, w, default_config());
    EXPECT_LT(symmetry_defect(sys.matrix), 1e-13);
    const Eigen::MatrixXd dense(sys.matrix);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(dense);
    EXPECT_GT(eig.eigenvalues().minCoeff(), 0.0);
    EXPECT_TRUE(sys.rhs.allFinite());
  }
}

TEST(NewtonSystem, PlainSpaceSystemIsSymmetricPositiveDefinite) {
  const Mesh mesh = Mesh::structured(3);
  const TrialSpace space = TrialSpace::plain(mesh, 2);
  const ExampleDef& ex = example("ex1");
  const PiecewiseField w = space.field(space.interpolate(ex.data.exact_grad));
  const LinearSystem sys = assemble_newton_system(space, ex.data, w, default_config());
  EXPECT_LT(symmetry_defect(sys.matrix), 1e-12);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig{Eigen::MatrixXd(sys.matrix)};
  EXPECT_GT(eig.eigenvalues().minCoeff(), 0.0);
}

TEST(NewtonSystem, RejectsNonpositiveSource) {
  const Mesh mesh = Mesh::structured(3);
  const ReconOp op = build_recon_op(mesh, 1, 5);
  const TrialSpace space = TrialSpace::reconstructed(op);
  ProblemData d = unit_source_zero_boundary();
  d.f = [](const Point& x) { return x.x() - 0.5; };
  const PiecewiseField w = space.field(space.interpolate(VectorFn([](const Point& x) { return Eigen::Vector2d(x); })));
  EXPECT_THROW(assemble_newton_system(space, d, w, default_config()), NewtonError);
  NewtonConfig bad;
  bad.eta = 0.0;
  EXPECT_THROW(assemble_newton_system(space, unit_source_zero_boundary(), w, bad), std::invalid_argument);
}

TEST(Newton, ZeroInitialGuessIsDegenerate) {
  const Mesh mesh = Mesh::structured(4);
  const ReconOp op = build_recon_op(mesh, 1, 5);
  const TrialSpace space = TrialSpace::reconstructed(op);
  EXPECT_THROW(newton_solve(space, example("ex1").data, Eigen::VectorXd::Zero(space.num_dofs()), default_config()),
               NewtonError);
  EXPECT_THROW(newton_solve(space, example("ex1").data, Eigen::VectorXd::Zero(3), default_config()),
               std::invalid_argument);
}

TEST(Newton, NonconvexCounts) {
  const Mesh mesh = Mesh::structured(5);
  const ReconOp op = build_recon_op(mesh, 1, 5);
  const TrialSpace space = TrialSpace::reconstructed(op);
  const auto convex = space.field(space.interpolate(VectorFn([](const Point& x) { return Eigen::Vector2d(x); })));
  const auto saddle = space.field(space.interpolate(VectorFn([](const Point& x) { return Eigen::Vector2d(x.x(), -x.y()); })));
  EXPECT_EQ(count_nonconvex(convex, mesh, 4), 0);
  EXPECT_EQ(count_nonconvex(saddle, mesh, 4), mesh.num_elements());
  const auto flags = nonconvex_flags(saddle, mesh, 4);
  EXPECT_EQ(static_cast<int>(flags.size()), mesh.num_elements());
  for (char f : flags) EXPECT_TRUE(f);
}

TEST(Poisson, MaximumPrincipleOnStructuredMesh) {
  const Mesh mesh = Mesh::structured(8);
  const LagrangeSpace lag(mesh, 1);
  const Eigen::VectorXd u = poisson_solve(lag, unit_source_zero_boundary());
  for (int i = 0; i < lag.num_nodes(); ++i) {
    if (lag.is_boundary(i)) {
      EXPECT_EQ(u(i), 0.0);
    } else {
      EXPECT_LT(u(i), 0.0);
    }
  }
}

TEST(Poisson, QuadraticDataIsExactForHigherDegree) {
  const Mesh mesh = Mesh::structured(4);
  const ExampleDef& ex = example("custom");
  for (int m = 2; m <= 3; ++m) {
    const LagrangeSpace lag(mesh, m);
    const Eigen::VectorXd u = poisson_solve(lag, ex.data);
    for (int i = 0; i < lag.num_nodes(); ++i) EXPECT_NEAR(u(i), ex.data.exact_u(lag.node(i)), 1e-12);
  }
}

TEST(Newton, ExactRepresentationIsAFixedPoint) {
  const Mesh mesh = Mesh::structured(6);
  const ExampleDef& ex = example("custom");
  for (int m = 1; m <= 3; ++m) {
    const ReconOp op = build_recon_op(mesh, m, default_patch_size(m));
    const TrialSpace space = TrialSpace::reconstructed(op);
    const Eigen::VectorXd exact = space.interpolate(ex.data.exact_grad);
    const NewtonReport r = newton_solve(space, ex.data, exact, default_config());
    ASSERT_TRUE(r.converged);
    EXPECT_EQ(r.iterations(), 1);
    EXPECT_LT((r.dofs - exact).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_EQ(r.initial_nonconvex, 0);
  }
}

class Example1Coarse : public ::testing::Test {
 protected:
  Mesh mesh = Mesh::structured(10);
  ReconOp op = build_recon_op(mesh, 1, 5);
  TrialSpace space = TrialSpace::reconstructed(op);
  const ExampleDef& ex = example("ex1");
};

TEST_F(Example1Coarse, PoissonAndExactStartsReachTheSameFixedPoint) {
  const NewtonReport a = newton_solve(space, ex.data, poisson_initializer(space, ex.data), default_config());
  const NewtonReport b = newton_solve(space, ex.data, space.interpolate(ex.data.exact_grad), default_config());
  ASSERT_TRUE(a.converged);
  ASSERT_TRUE(b.converged);
  EXPECT_LT((a.dofs - b.dofs).norm(), 1e-8);
  EXPECT_LE(b.iterations(), a.iterations());
}

TEST_F(Example1Coarse, RestartFromSolutionStopsImmediately) {
  const NewtonReport a = newton_solve(space, ex.data, poisson_initializer(space, ex.data), default_config());
  ASSERT_TRUE(a.converged);
  const NewtonReport again = newton_solve(space, ex.data, a.dofs, default_config());
  ASSERT_TRUE(again.converged);
  EXPECT_EQ(again.iterations(), 1);
  EXPECT_LT(again.steps.front().rel_increment, 1e-10);
}

// Quadratic convergence needs det(grad p_h) = f at the discrete fixed point,
// which holds when the exact gradient lies in the space.
TEST(Newton, QuadraticConvergenceWithZeroResidual) {
  const Mesh mesh = Mesh::structured(8);
  const ExampleDef& ex = example("custom");
  for (int m = 1; m <= 3; ++m) {
    const ReconOp op = build_recon_op(mesh, m, default_patch_size(m));
    const TrialSpace space = TrialSpace::reconstructed(op);
    const Eigen::VectorXd init = space.interpolate(VectorFn([](const Point& x) {
      return Eigen::Vector2d(x.x() + 0.2 * std::sin(3 * x.y()), x.y() + 0.2 * std::sin(3 * x.x()));
    }));
    NewtonConfig cfg;
    cfg.tol = 1e-14;
    const NewtonReport r = newton_solve(space, ex.data, init, cfg);
    ASSERT_TRUE(r.converged);
    std::vector<double> incr;
    for (const auto& s : r.steps) {
      if (s.rel_increment > 1e-11) incr.push_back(s.rel_increment);
    }
    ASSERT_GE(incr.size(), 3u);
    const std::size_t last = incr.size() - 1;
    const double ratio = std::log(incr[last]) / std::log(incr[last - 1]);
    EXPECT_GE(ratio, 1.5) << "m = " << m;
    EXPECT_LE(ratio, 2.5) << "m = " << m;
  }
}

// With a nonzero discrete residual the iteration contracts linearly, with a
// factor that shrinks as the residual does under refinement.
TEST(Newton, LinearContractionImprovesWithRefinement) {
  const ExampleDef& ex = example("ex1");
  std::vector<double> factors;
  for (int n : {10, 20}) {
    const Mesh mesh = Mesh::structured(n);
    const ReconOp op = build_recon_op(mesh, 1, 5);
    const TrialSpace space = TrialSpace::reconstructed(op);
    NewtonConfig cfg;
    cfg.max_iter = 5;
    const NewtonReport r = newton_solve(space, ex.data, space.interpolate(ex.data.exact_grad), cfg);
    ASSERT_EQ(r.iterations(), 5);
    const double f = r.steps[4].rel_increment / r.steps[3].rel_increment;
    EXPECT_LT(f, 0.1);
    factors.push_back(f);
  }
  EXPECT_LT(factors[1], factors[0]);
}

TEST_F(Example1Coarse, IdentityDefectStaysAtRoundOff) {
  const NewtonReport r = newton_solve(space, ex.data, poisson_initializer(space, ex.data), default_config());
  EXPECT_LT(r.max_identity_defect, 1e-10);
}

TEST_F(Example1Coarse, OneStepFromInterpolantMovesLessThanDiscretizationError) {
  NewtonConfig cfg;
  cfg.max_iter = 1;
  const Eigen::VectorXd exact = space.interpolate(ex.data.exact_grad);
  const NewtonReport r = newton_solve(space, ex.data, exact, cfg);
  const double step = pnorm(mesh, space.field(r.dofs - exact), error_quad_degree(1));
  const double interp_error = pnorm_error(mesh, space.field(exact), ex.data.exact_grad, ex.data.exact_hessian,
                                          error_quad_degree(1));
  EXPECT_LT(step, interp_error);
}

TEST(Newton, EnergyErrorConvergesAtOptimalRate) {
  const ExampleDef& ex = example("ex1");
  for (int m = 2; m <= 3; ++m) {
    std::vector<std::pair<double, double>> errs;
    for (int n : {10, 20}) {
      const Mesh mesh = Mesh::structured(n);
      const ReconOp op = build_recon_op(mesh, m, default_patch_size(m));
      const TrialSpace space = TrialSpace::reconstructed(op);
      const NewtonReport r = newton_solve(space, ex.data, poisson_initializer(space, ex.data), default_config());
      ASSERT_TRUE(r.converged);
      errs.emplace_back(1.0 / n, pnorm_error(mesh, space.field(r.dofs), ex.data.exact_grad, ex.data.exact_hessian,
                                             error_quad_degree(m)));
    }
    EXPECT_NEAR(convergence_order(errs).back(), m, 0.25) << "m = " << m;
  }
}

TEST(Newton, ObserverSeesEveryIterate) {
  const Mesh mesh = Mesh::structured(6);
  const ReconOp op = build_recon_op(mesh, 1, 5);
  const TrialSpace space = TrialSpace::reconstructed(op);
  const ExampleDef& ex = example("ex1");
  std::vector<int> seen;
  const NewtonReport r = newton_solve(space, ex.data, poisson_initializer(space, ex.data), default_config(),
                                      [&seen](int it, const PiecewiseField&) { seen.push_back(it); });
  ASSERT_EQ(static_cast<int>(seen.size()), r.iterations());
  for (std::size_t i = 0; i < seen.size(); ++i) EXPECT_EQ(seen[i], static_cast<int>(i) + 1);
  EXPECT_EQ(r.converged, r.steps.back().rel_increment < NewtonConfig{}.tol);
}

TEST(Newton, MaxIterationsReportsNonConvergence) {
  const Mesh mesh = Mesh::structured(6);
  const ReconOp op = build_recon_op(mesh, 1, 5);
  const TrialSpace space = TrialSpace::reconstructed(op);
  const ExampleDef& ex = example("ex2");
  NewtonConfig cfg;
  cfg.max_iter = 2;
  const NewtonReport r = newton_solve(space, ex.data, space.interpolate(ex.initializers.at("far").grad), cfg);
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.iterations(), 2);
}
