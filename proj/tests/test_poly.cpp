#include <cmath>
#include <random>

#include <Eigen/QR>
#include <gtest/gtest.h>

#include "malsfem/poly.hpp"
#include "malsfem/quadrature.hpp"

using namespace malsfem;

namespace {

double factorial(int n) { return std::tgamma(n + 1.0); }

int member_with(const IrrotBasis& b, int a, int c) {
  for (int l = 0; l < b.size(); ++l) {
    if (b.exponents()[static_cast<std::size_t>(l)] == std::pair<int, int>(a, c)) return l;
  }
  return -1;
}

}  // namespace

TEST(IrrotBasis, Dimension) {
  EXPECT_EQ(irrot_dim(1), 5);
  EXPECT_EQ(irrot_dim(2), 9);
  EXPECT_EQ(irrot_dim(3), 14);
  for (int m = 1; m <= 4; ++m) EXPECT_EQ(IrrotBasis(m, Point(0.3, 0.1), 0.5).size(), irrot_dim(m));
  EXPECT_THROW(IrrotBasis(0, Point::Zero(), 1.0), std::invalid_argument);
  EXPECT_THROW(IrrotBasis(1, Point::Zero(), 0.0), std::invalid_argument);
}

TEST(IrrotBasis, LinearSpanMatchesClosedForm) {
  const IrrotBasis b(1, Point::Zero(), 1.0);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  const int npts = 6;
  Eigen::MatrixXd both(2 * npts, 10);
  for (int i = 0; i < npts; ++i) {
    const Point x(u(rng), u(rng));
    const ValueMatrix v = b.eval(x);
    const Eigen::Matrix<double, 5, 2> ref =
        (Eigen::Matrix<double, 5, 2>() << 1, 0, 0, 1, x.x(), 0, 0, x.y(), x.y(), x.x()).finished();
    for (int l = 0; l < 5; ++l) {
      both.block(2 * i, l, 2, 1) = v.row(l).transpose();
      both.block(2 * i, 5 + l, 2, 1) = ref.row(l).transpose();
    }
  }
  EXPECT_EQ(Eigen::ColPivHouseholderQR<Eigen::MatrixXd>(both.leftCols(5)).rank(), 5);
  EXPECT_EQ(Eigen::ColPivHouseholderQR<Eigen::MatrixXd>(both.rightCols(5)).rank(), 5);
  EXPECT_EQ(Eigen::ColPivHouseholderQR<Eigen::MatrixXd>(both).rank(), 5);
}

TEST(IrrotBasis, MixedMemberEvaluatesToSwappedPoint) {
  const IrrotBasis b(1, Point::Zero(), 1.0);
  const int l = member_with(b, 1, 1);
  ASSERT_GE(l, 0);
  const ValueMatrix v = b.eval(Point(2, 3));
  EXPECT_DOUBLE_EQ(v(l, 0), 3.0);
  EXPECT_DOUBLE_EQ(v(l, 1), 2.0);
  const Eigen::Matrix2d j = to_matrix(b.eval_jacobian(Point(2, 3)).row(l));
  EXPECT_EQ(j, (Eigen::Matrix2d() << 0, 1, 1, 0).finished());
  const int lx = member_with(b, 2, 0);
  ASSERT_GE(lx, 0);
  const Eigen::Matrix2d jx = to_matrix(b.eval_jacobian(Point(0.4, -0.7)).row(lx));
  EXPECT_EQ(jx, (Eigen::Matrix2d() << 2, 0, 0, 0).finished());
}

TEST(IrrotBasis, ConstantMembersFirstAndOthersVanishAtCenter) {
  for (int m = 1; m <= 3; ++m) {
    const Point c(0.25, 0.75);
    const IrrotBasis b(m, c, 0.1);
    const ValueMatrix v = b.eval(c);
    EXPECT_EQ(v.row(0), Eigen::RowVector2d(1, 0));
    EXPECT_EQ(v.row(1), Eigen::RowVector2d(0, 1));
    for (int l = 2; l < b.size(); ++l) EXPECT_EQ(v.row(l).norm(), 0.0);
  }
}

TEST(IrrotBasis, ScalingFollowsChainRule) {
  const Point c(0.2, -0.1);
  const Point x(0.7, 0.4);
  const IrrotBasis b1(3, c, 1.0);
  const double s = 0.3;
  const IrrotBasis bs(3, c, s);
  const ValueMatrix v1 = b1.eval(x);
  const ValueMatrix vs = bs.eval(x);
  for (int l = 0; l < b1.size(); ++l) {
    const auto [a, e] = b1.exponents()[static_cast<std::size_t>(l)];
    const double factor = std::pow(s, -(a + e - 1));
    EXPECT_NEAR((vs.row(l) - factor * v1.row(l)).norm(), 0.0, 1e-12 * factor * (1 + v1.row(l).norm()));
    if (a + e == 1) EXPECT_EQ(vs.row(l), v1.row(l));
  }
}

TEST(IrrotBasis, CurlFreeAndSymmetricJacobians) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int m = 1; m <= 3; ++m) {
    const IrrotBasis b(m, Point(0.5, 0.5), 0.7);
    for (int i = 0; i < 100; ++i) {
      const JacMatrix j = b.eval_jacobian(Point(u(rng), u(rng)));
      for (int l = 0; l < b.size(); ++l) EXPECT_EQ(j(l, 1), j(l, 2));
    }
  }
}

TEST(IrrotBasis, JacobianMatchesCentralDifferences) {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double step = 1e-5;
  for (int m = 1; m <= 3; ++m) {
    const IrrotBasis b(m, Point(0.5, 0.5), 1.0);
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
      const Point x(u(rng), u(rng));
      const JacMatrix j = b.eval_jacobian(x);
      const ValueMatrix dx = (b.eval(x + Point(step, 0)) - b.eval(x - Point(step, 0))) / (2 * step);
      const ValueMatrix dy = (b.eval(x + Point(0, step)) - b.eval(x - Point(0, step))) / (2 * step);
      for (int l = 0; l < b.size(); ++l) {
        worst = std::max({worst, std::abs(j(l, 0) - dx(l, 0)), std::abs(j(l, 1) - dy(l, 0)),
                          std::abs(j(l, 2) - dx(l, 1)), std::abs(j(l, 3) - dy(l, 1))});
      }
    }
    EXPECT_LT(worst, 1e-8) << "m = " << m;
  }
}

TEST(IrrotBasis, EvalIntoMatchesSeparateCalls) {
  const IrrotBasis b(2, Point(0.1, 0.2), 0.4);
  ValueMatrix v(b.size(), 2);
  JacMatrix j(b.size(), 4);
  const Point x(0.3, 0.9);
  b.eval_into(x, v, j);
  EXPECT_EQ(v, b.eval(x));
  EXPECT_EQ(j, b.eval_jacobian(x));
}

TEST(LagrangeBasis, SizesAndNodalProperty) {
  const int sizes[] = {3, 6, 10};
  for (int m = 1; m <= 3; ++m) {
    const LagrangeBasis b(m);
    ASSERT_EQ(b.size(), sizes[m - 1]);
    for (int i = 0; i < b.size(); ++i) {
      const Eigen::VectorXd v = b.eval(b.nodes()[static_cast<std::size_t>(i)]);
      for (int j = 0; j < b.size(); ++j) EXPECT_NEAR(v(j), i == j ? 1.0 : 0.0, 1e-13);
    }
  }
  EXPECT_THROW(LagrangeBasis(0), std::invalid_argument);
  EXPECT_THROW(LagrangeBasis(4), std::invalid_argument);
}

TEST(LagrangeBasis, PartitionOfUnity) {
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int m = 1; m <= 3; ++m) {
    const LagrangeBasis b(m);
    for (int i = 0; i < 50; ++i) {
      Eigen::Vector2d xi(u(rng), u(rng));
      if (xi.sum() > 1.0) xi = Eigen::Vector2d(1.0, 1.0) - xi;
      EXPECT_NEAR(b.eval(xi).sum(), 1.0, 1e-14);
      EXPECT_NEAR(b.grad(xi).colwise().sum().norm(), 0.0, 1e-12);
    }
  }
}

TEST(LagrangeBasis, GradientMatchesCentralDifferences) {
  const LagrangeBasis b(3);
  const Eigen::Vector2d xi(0.2, 0.3);
  const double step = 1e-6;
  const ValueMatrix g = b.grad(xi);
  const Eigen::VectorXd dx = (b.eval(xi + Eigen::Vector2d(step, 0)) - b.eval(xi - Eigen::Vector2d(step, 0))) / (2 * step);
  const Eigen::VectorXd dy = (b.eval(xi + Eigen::Vector2d(0, step)) - b.eval(xi - Eigen::Vector2d(0, step))) / (2 * step);
  EXPECT_LT((g.col(0) - dx).cwiseAbs().maxCoeff(), 1e-7);
  EXPECT_LT((g.col(1) - dy).cwiseAbs().maxCoeff(), 1e-7);
}

TEST(Quadrature, CentroidAndTwoPointGauss) {
  const QuadRule& t1 = quadrature(QuadKind::triangle, 1);
  ASSERT_EQ(t1.size(), 1u);
  EXPECT_NEAR(t1.weights[0], 0.5, 1e-15);
  EXPECT_NEAR((t1.points[0] - Eigen::Vector2d(1.0 / 3, 1.0 / 3)).norm(), 0.0, 1e-15);

  const QuadRule& s3 = quadrature(QuadKind::segment, 3);
  ASSERT_EQ(s3.size(), 2u);
  double cube = 0.0;
  for (std::size_t i = 0; i < s3.size(); ++i) cube += s3.weights[i] * std::pow(s3.points[i].x(), 3);
  EXPECT_NEAR(cube, 0.25, 1e-15);
}

TEST(Quadrature, TriangleRulesIntegrateMonomialsExactly) {
  for (int deg = 0; deg <= kMaxQuadDegree; ++deg) {
    const QuadRule& r = quadrature(QuadKind::triangle, deg);
    double wsum = 0.0;
    for (double w : r.weights) wsum += w;
    EXPECT_NEAR(wsum, 0.5, 1e-14);
    for (int a = 0; a <= deg; ++a) {
      for (int b = 0; a + b <= deg; ++b) {
        double q = 0.0;
        for (std::size_t i = 0; i < r.size(); ++i) {
          q += r.weights[i] * std::pow(r.points[i].x(), a) * std::pow(r.points[i].y(), b);
        }
        const double exact = factorial(a) * factorial(b) / factorial(a + b + 2);
        EXPECT_NEAR(q, exact, 1e-14) << "degree " << deg << " monomial " << a << "," << b;
      }
    }
  }
}

TEST(Quadrature, SegmentRulesIntegrateMonomialsExactly) {
  for (int deg = 0; deg <= kMaxQuadDegree; ++deg) {
    const QuadRule& r = quadrature(QuadKind::segment, deg);
    for (int a = 0; a <= deg; ++a) {
      double q = 0.0;
      for (std::size_t i = 0; i < r.size(); ++i) q += r.weights[i] * std::pow(r.points[i].x(), a);
      EXPECT_NEAR(q, 1.0 / (a + 1), 1e-15);
    }
  }
}

TEST(Quadrature, ProductsOfBasisDegreeMonomials) {
  for (int m = 1; m <= 3; ++m) {
    const QuadRule& r = quadrature(QuadKind::triangle, 2 * m + 2);
    for (int a1 = 0; a1 <= m + 1; ++a1) {
      for (int a2 = 0; a2 <= m + 1; ++a2) {
        const int b1 = m + 1 - a1;
        const int b2 = m + 1 - a2;
        double q = 0.0;
        for (std::size_t i = 0; i < r.size(); ++i) {
          const auto& p = r.points[i];
          q += r.weights[i] * std::pow(p.x(), a1 + a2) * std::pow(p.y(), b1 + b2);
        }
        EXPECT_NEAR(q, factorial(a1 + a2) * factorial(b1 + b2) / factorial(2 * m + 4), 1e-15);
      }
    }
  }
}

TEST(Quadrature, RejectsUnsupportedDegree) {
  EXPECT_THROW(quadrature(QuadKind::triangle, kMaxQuadDegree + 1), std::invalid_argument);
  EXPECT_THROW(quadrature(QuadKind::segment, -1), std::invalid_argument);
}

TEST(Quadrature, MappedRuleIntegratesArea) {
  const std::array<Eigen::Vector2d, 3> tri{Eigen::Vector2d(0.1, 0.2), Eigen::Vector2d(0.9, 0.3),
                                           Eigen::Vector2d(0.4, 0.8)};
  const MappedRule q = map_triangle(quadrature(QuadKind::triangle, 2), tri);
  double area = 0.0;
  Eigen::Vector2d centroid = Eigen::Vector2d::Zero();
  for (std::size_t i = 0; i < q.points.size(); ++i) {
    area += q.weights[i];
    centroid += q.weights[i] * q.points[i];
  }
  EXPECT_NEAR(area, 0.5 * std::abs((tri[1] - tri[0]).x() * (tri[2] - tri[0]).y() -
                                   (tri[1] - tri[0]).y() * (tri[2] - tri[0]).x()), 1e-15);
  EXPECT_NEAR((centroid / area - (tri[0] + tri[1] + tri[2]) / 3).norm(), 0.0, 1e-15);
  const MappedRule s = map_segment(quadrature(QuadKind::segment, 1), tri[0], tri[1]);
  double len = 0.0;
  for (double w : s.weights) len += w;
  EXPECT_NEAR(len, (tri[1] - tri[0]).norm(), 1e-15);
}
