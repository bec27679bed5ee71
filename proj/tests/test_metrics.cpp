#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "malsfem/metrics.hpp"
#include "malsfem/problems.hpp"
#include "malsfem/recon.hpp"

using namespace malsfem;

namespace {

VectorFn zero_vec = [](const Point&) { return Eigen::Vector2d::Zero().eval(); };
MatrixFn zero_mat = [](const Point&) { return Eigen::Matrix2d::Zero().eval(); };

}  // namespace

TEST(Metrics, QuadratureDegree) {
  EXPECT_EQ(error_quad_degree(1), 6);
  EXPECT_EQ(error_quad_degree(3), 10);
  EXPECT_EQ(error_quad_degree(8), 12);
}

TEST(Metrics, ZeroFieldHasZeroErrors) {
  const Mesh mesh = Mesh::structured(4);
  const TrialSpace s = TrialSpace::plain(mesh, 1);
  const PiecewiseField f = s.field(Eigen::VectorXd::Zero(s.num_dofs()));
  EXPECT_EQ(l2_error(mesh, f, zero_vec, 6), 0.0);
  EXPECT_EQ(l2_error(mesh, f, VectorFn{}, 6), 0.0);
  EXPECT_EQ(pnorm_error(mesh, f, zero_vec, zero_mat, 6), 0.0);
  EXPECT_EQ(pnorm(mesh, f, 6), 0.0);
  const LagrangeSpace lag(mesh, 2);
  const ScalarField u(lag, Eigen::VectorXd::Zero(lag.num_nodes()));
  EXPECT_EQ(l2_error(u, {}, 6), 0.0);
  EXPECT_EQ(unorm_error(u, {}, {}, 6), 0.0);
}

TEST(Metrics, KnownIntegral) {
  const Mesh mesh = Mesh::structured(3);
  const TrialSpace s = TrialSpace::plain(mesh, 1);
  const PiecewiseField f = s.field(s.interpolate(VectorFn([](const Point& x) { return Eigen::Vector2d(x.x(), 0); })));
  EXPECT_NEAR(l2_error(mesh, f, zero_vec, 6), 1.0 / std::sqrt(3.0), 1e-14);
  // Against the field itself the error vanishes.
  EXPECT_NEAR(l2_error(mesh, f, [](const Point& x) { return Eigen::Vector2d(x.x(), 0); }, 6), 0.0, 1e-14);
}

TEST(Metrics, PnormOfPolynomialInterpolantVanishes) {
  const Mesh mesh = Mesh::structured(5);
  const ExampleDef& ex = example("custom");
  for (int m = 1; m <= 3; ++m) {
    const ReconOp op = build_recon_op(mesh, m, default_patch_size(m));
    const TrialSpace s = TrialSpace::reconstructed(op);
    const PiecewiseField f = s.field(s.interpolate(ex.data.exact_grad));
    EXPECT_LT(pnorm_error(mesh, f, ex.data.exact_grad, ex.data.exact_hessian, error_quad_degree(m)), 1e-10);
  }
}

TEST(Metrics, PnormDominatesBrokenSeminorm) {
  const Mesh mesh = Mesh::structured(4);
  const TrialSpace s = TrialSpace::plain(mesh, 2);
  Eigen::VectorXd d = Eigen::VectorXd::LinSpaced(s.num_dofs(), -1.0, 1.0);
  const PiecewiseField f = s.field(d);
  double semi = 0.0;
  for (int k = 0; k < mesh.num_elements(); ++k) {
    // Degree-2 Jacobians are linear, so a degree-2 rule is exact for their squares.
    const auto& c = mesh.element_vertices(k);
    const std::array<Point, 3> mids{(c[0] + c[1]) / 2, (c[1] + c[2]) / 2, (c[2] + c[0]) / 2};
    for (const auto& x : mids) semi += mesh.area(k) / 3 * f.jacobian(k, x).squaredNorm();
  }
  EXPECT_GE(pnorm(mesh, f, 6), std::sqrt(semi) - 1e-12);
}

TEST(Metrics, NormsAreAbsolutelyHomogeneous) {
  const Mesh mesh = Mesh::structured(4);
  const TrialSpace s = TrialSpace::plain(mesh, 2);
  const Eigen::VectorXd d = Eigen::VectorXd::LinSpaced(s.num_dofs(), -0.5, 2.0);
  const double base = pnorm(mesh, s.field(d), 8);
  const double base_l2 = l2_error(mesh, s.field(d), {}, 8);
  for (double c : {-3.0, 0.25, 7.0}) {
    EXPECT_NEAR(pnorm(mesh, s.field(c * d), 8), std::abs(c) * base, 1e-12 * std::abs(c) * base);
    EXPECT_NEAR(l2_error(mesh, s.field(c * d), {}, 8), std::abs(c) * base_l2, 1e-12 * std::abs(c) * base_l2);
  }
  const LagrangeSpace lag(mesh, 2);
  const Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(lag.num_nodes(), 0.0, 1.0);
  const double ub = unorm_error(ScalarField(lag, v), {}, {}, 8);
  EXPECT_NEAR(unorm_error(ScalarField(lag, -2.5 * v), {}, {}, 8), 2.5 * ub, 1e-12 * ub);
}

TEST(Metrics, UnormBoundaryTermUsesGlobalMeshSize) {
  // v = 1: zero gradient, boundary term (1/h) * perimeter = 4/h.
  const Mesh mesh = Mesh::structured(4);
  const LagrangeSpace lag(mesh, 1);
  const ScalarField one(lag, Eigen::VectorXd::Ones(lag.num_nodes()));
  EXPECT_NEAR(unorm_error(one, {}, {}, 4), std::sqrt(4.0 / mesh.h()), 1e-13);
}

TEST(Metrics, ConvergenceOrder) {
  EXPECT_DOUBLE_EQ(convergence_order({{1.0, 1.0}, {0.5, 0.25}}).front(), 2.0);
  EXPECT_NEAR(convergence_order({{0.1, 1.643e-1}, {0.05, 8.078e-2}}).front(), 1.02, 0.005);
  EXPECT_DOUBLE_EQ(convergence_order({{0.1, 3.0}, {0.05, 3.0}}).front(), 0.0);
  EXPECT_EQ(convergence_order({{0.1, 1.0}, {0.05, 0.5}, {0.025, 0.25}}).size(), 2u);
  EXPECT_THROW(convergence_order({{0.1, 0.0}, {0.05, 1.0}}), std::invalid_argument);
  EXPECT_THROW(convergence_order({{0.1, 1.0}, {0.05, -1.0}}), std::invalid_argument);
}

TEST(Metrics, CsvHasEmptyFieldsForMissingErrors) {
  ErrorRecord ok;
  ok.m = 1;
  ok.n = 10;
  ok.h = 0.1;
  ok.p_energy = 0.5;
  ok.p_l2 = 0.25;
  ok.u_energy = 0.125;
  ok.u_l2 = 0.0625;
  ok.iterations = 6;
  ok.converged = true;
  ErrorRecord bad = ok;
  bad.n = 20;
  bad.p_energy.reset();
  bad.p_l2.reset();
  bad.u_energy.reset();
  bad.u_l2.reset();
  bad.converged = false;
  std::ostringstream out;
  write_csv(out, {ok, bad});
  std::istringstream in(out.str());
  std::string header, row1, row2;
  std::getline(in, header);
  std::getline(in, row1);
  std::getline(in, row2);
  EXPECT_EQ(header, "m,n,h,p_energy,p_l2,u_energy,u_l2,iterations,converged,dofs_p,dofs_u,wall_time");
  EXPECT_NE(row1.find("5.000000e-01"), std::string::npos);
  EXPECT_NE(row2.find(",,,,"), std::string::npos);
  std::ostringstream table;
  write_table(table, {ok, bad});
  EXPECT_NE(table.str().find("inf"), std::string::npos);
}
