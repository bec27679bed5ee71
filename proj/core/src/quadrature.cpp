#include "malsfem/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace malsfem {

void gauss_legendre(int npoints, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(static_cast<std::size_t>(npoints), 0.0);
  weights.assign(static_cast<std::size_t>(npoints), 0.0);
  for (int i = 0; i < npoints; ++i) {
    // Newton on P_n starting from the Chebyshev-like guess
    double x = std::cos(std::numbers::pi * (i + 0.75) / (npoints + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= npoints; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double pn = npoints == 0 ? 1.0 : (npoints == 1 ? x : p1);
      const double pnm1 = npoints == 1 ? 1.0 : p0;
      dp = npoints * (x * pn - pnm1) / (x * x - 1.0);
      const double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // map [-1,1] -> [0,1]
    nodes[static_cast<std::size_t>(i)] = 0.5 * (1.0 - x);
    weights[static_cast<std::size_t>(i)] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
}

namespace {

QuadRule make_segment(int degree) {
  QuadRule r;
  r.kind = QuadKind::segment;
  r.degree = degree;
  const int n = std::max(1, (degree + 2) / 2);
  std::vector<double> x;
  std::vector<double> w;
  gauss_legendre(n, x, w);
  for (int i = 0; i < n; ++i) {
    r.points.emplace_back(x[static_cast<std::size_t>(i)], 0.0);
    r.weights.push_back(w[static_cast<std::size_t>(i)]);
  }
  return r;
}

// Collapsed (Duffy) product rule: x = u, y = v (1 - u), dA = (1 - u) du dv.
QuadRule make_triangle(int degree) {
  QuadRule r;
  r.kind = QuadKind::triangle;
  r.degree = degree;
  if (degree <= 1) {
    r.points.emplace_back(1.0 / 3.0, 1.0 / 3.0);
    r.weights.push_back(0.5);
    return r;
  }
  const int nu = (degree + 3) / 2;
  const int nv = (degree + 2) / 2;
  std::vector<double> xu, wu, xv, wv;
  gauss_legendre(nu, xu, wu);
  gauss_legendre(nv, xv, wv);
  for (int i = 0; i < nu; ++i) {
    for (int j = 0; j < nv; ++j) {
      const double u = xu[static_cast<std::size_t>(i)];
      const double v = xv[static_cast<std::size_t>(j)];
      r.points.emplace_back(u, v * (1.0 - u));
      r.weights.push_back(wu[static_cast<std::size_t>(i)] * wv[static_cast<std::size_t>(j)] *
                          (1.0 - u));
    }
  }
  return r;
}

struct RuleTable {
  std::vector<QuadRule> triangle;
  std::vector<QuadRule> segment;
  RuleTable() {
    for (int d = 0; d <= kMaxQuadDegree; ++d) {
      triangle.push_back(make_triangle(d));
      segment.push_back(make_segment(d));
    }
  }
};

}  // namespace

const QuadRule& quadrature(QuadKind kind, int degree) {
  if (degree < 0 || degree > kMaxQuadDegree) {
    throw std::invalid_argument("unsupported quadrature degree " + std::to_string(degree));
  }
  static const RuleTable table;
  return kind == QuadKind::triangle ? table.triangle[static_cast<std::size_t>(degree)]
                                    : table.segment[static_cast<std::size_t>(degree)];
}

MappedRule map_triangle(const QuadRule& rule, const std::array<Eigen::Vector2d, 3>& tri) {
  const Eigen::Vector2d e1 = tri[1] - tri[0];
  const Eigen::Vector2d e2 = tri[2] - tri[0];
  const double jac = std::abs(e1.x() * e2.y() - e1.y() * e2.x());
  MappedRule out;
  out.points.reserve(rule.size());
  out.weights.reserve(rule.size());
  for (std::size_t q = 0; q < rule.size(); ++q) {
    out.points.push_back(tri[0] + rule.points[q].x() * e1 + rule.points[q].y() * e2);
    out.weights.push_back(rule.weights[q] * jac);
  }
  return out;
}

MappedRule map_segment(const QuadRule& rule, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  const double len = (b - a).norm();
  MappedRule out;
  out.points.reserve(rule.size());
  out.weights.reserve(rule.size());
  for (std::size_t q = 0; q < rule.size(); ++q) {
    out.points.push_back(a + rule.points[q].x() * (b - a));
    out.weights.push_back(rule.weights[q] * len);
  }
  return out;
}

}  // namespace malsfem
