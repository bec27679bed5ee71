#include "malsfem/problems.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include <Eigen/LU>

namespace malsfem {

namespace {

using Eigen::Matrix2d;
using Eigen::Vector2d;

// u = exp(r^2/2)
ProblemData exp_problem() {
  ProblemData d;
  auto u = [](const Point& x) { return std::exp(0.5 * x.squaredNorm()); };
  auto grad = [u](const Point& x) -> Vector2d { return u(x) * x; };
  d.f = [](const Point& x) {
    const double r2 = x.squaredNorm();
    return (1.0 + r2) * std::exp(r2);
  };
  d.g = u;
  d.grad_g = grad;
  d.exact_u = u;
  d.exact_grad = grad;
  d.exact_hessian = [u](const Point& x) -> Matrix2d {
    return u(x) * (Matrix2d::Identity() + x * x.transpose());
  };
  return d;
}

// u = -sqrt(3 - r^2)
ProblemData sphere_problem() {
  constexpr double R2 = 3.0;
  ProblemData d;
  auto u = [](const Point& x) { return -std::sqrt(R2 - x.squaredNorm()); };
  auto grad = [](const Point& x) -> Vector2d { return x / std::sqrt(R2 - x.squaredNorm()); };
  d.f = [](const Point& x) {
    const double s2 = R2 - x.squaredNorm();
    return R2 / (s2 * s2);
  };
  d.g = u;
  d.grad_g = grad;
  d.exact_u = u;
  d.exact_grad = grad;
  d.exact_hessian = [](const Point& x) -> Matrix2d {
    const double s = std::sqrt(R2 - x.squaredNorm());
    return Matrix2d::Identity() / s + x * x.transpose() / (s * s * s);
  };
  return d;
}

// u = r^a + r^2/2 with a > 2; D^2 u = (a r^(a-2) + 1) I + a(a-2) r^(a-4) x x^T
ProblemData power_problem(double a) {
  ProblemData d;
  auto u = [a](const Point& x) {
    const double r2 = x.squaredNorm();
    return std::pow(r2, 0.5 * a) + 0.5 * r2;
  };
  auto grad = [a](const Point& x) -> Vector2d {
    return (a * std::pow(x.squaredNorm(), 0.5 * a - 1.0) + 1.0) * x;
  };
  d.f = [a](const Point& x) {
    const double s = std::pow(x.squaredNorm(), 0.5 * a - 1.0);
    return (a * s + 1.0) * (a * (a - 1.0) * s + 1.0);
  };
  d.g = u;
  d.grad_g = grad;
  d.exact_u = u;
  d.exact_grad = grad;
  d.exact_hessian = [a](const Point& x) -> Matrix2d {
    const double r2 = x.squaredNorm();
    return (a * std::pow(r2, 0.5 * a - 1.0) + 1.0) * Matrix2d::Identity() +
           a * (a - 2.0) * std::pow(r2, 0.5 * a - 2.0) * x * x.transpose();
  };
  return d;
}

// u = r^2/2, f = 1
ProblemData quadratic_problem() {
  ProblemData d;
  auto u = [](const Point& x) { return 0.5 * x.squaredNorm(); };
  auto grad = [](const Point& x) -> Vector2d { return x; };
  d.f = [](const Point&) { return 1.0; };
  d.g = u;
  d.grad_g = grad;
  d.exact_u = u;
  d.exact_grad = grad;
  d.exact_hessian = [](const Point&) -> Matrix2d { return Matrix2d::Identity(); };
  return d;
}

Initializer far_convex() {
  // 5x^4 + 10x^2 - xy + 0.1y^2 - 5x - 3y
  return {[](const Point& p) {
            const double x = p.x(), y = p.y();
            return 5 * std::pow(x, 4) + 10 * x * x - x * y + 0.1 * y * y - 5 * x - 3 * y;
          },
          [](const Point& p) -> Vector2d {
            const double x = p.x(), y = p.y();
            return {20 * x * x * x + 20 * x - y - 5, -x + 0.2 * y - 3};
          }};
}

Initializer bump_convex() {
  // 5(x^2+y^2) + sin(pi x) sin(pi y)
  constexpr double pi = std::numbers::pi;
  return {[](const Point& p) {
            return 5 * p.squaredNorm() + std::sin(pi * p.x()) * std::sin(pi * p.y());
          },
          [](const Point& p) -> Vector2d {
            return {10 * p.x() + pi * std::cos(pi * p.x()) * std::sin(pi * p.y()),
                    10 * p.y() + pi * std::sin(pi * p.x()) * std::cos(pi * p.y())};
          }};
}

Initializer saddle() {
  return {[](const Point& p) { return p.x() * p.x() - p.y() * p.y(); },
          [](const Point& p) -> Vector2d { return {2 * p.x(), -2 * p.y()}; }};
}

Initializer exact_init(const ProblemData& d) { return {d.exact_u, d.exact_grad}; }

std::map<std::string, ExampleDef, std::less<>> build_registry() {
  std::map<std::string, ExampleDef, std::less<>> reg;
  {
    ExampleDef e{"ex1", "u = exp(r^2/2), Poisson initial guess", exp_problem(), {}, "poisson"};
    e.initializers.emplace("far", far_convex());
    e.initializers.emplace("exact", exact_init(e.data));
    reg.emplace(e.name, e);
  }
  {
    ExampleDef e{"ex2", "u = exp(r^2/2), initial guess 5x^4+10x^2-xy+0.1y^2-5x-3y", exp_problem(),
                 {}, "far"};
    e.initializers.emplace("far", far_convex());
    e.initializers.emplace("exact", exact_init(e.data));
    reg.emplace(e.name, e);
  }
  {
    ExampleDef e{"ex3", "u = -sqrt(3 - r^2), initial guess 5r^2 + sin(pi x) sin(pi y)",
                 sphere_problem(), {}, "bump"};
    e.initializers.emplace("bump", bump_convex());
    e.initializers.emplace("exact", exact_init(e.data));
    reg.emplace(e.name, e);
  }
  {
    // u = (x^2+y^2)^(9/4) + (x^2+y^2)/2 lies in H^5.5 but not H^6
    ExampleDef e{"ex4", "u = r^4.5 + r^2/2, non-convex initial guess x^2 - y^2", power_problem(4.5), {},
                 "saddle"};
    e.initializers.emplace("saddle", saddle());
    e.initializers.emplace("exact", exact_init(e.data));
    reg.emplace(e.name, e);
  }
  {
    // steeper variant (x^2+y^2)^(9/2); f reaches ~8e4 at (1,1) and the
    // iteration converges only linearly, if at all
    ExampleDef e{"ex4-r9", "u = r^9 + r^2/2, non-convex initial guess x^2 - y^2", power_problem(9.0), {},
                 "saddle"};
    e.initializers.emplace("saddle", saddle());
    e.initializers.emplace("exact", exact_init(e.data));
    reg.emplace(e.name, e);
  }
  {
    ExampleDef e{"custom", "u = r^2/2, f = 1", quadratic_problem(), {}, "poisson"};
    e.initializers.emplace("exact", exact_init(e.data));
    e.initializers.emplace("saddle", saddle());
    reg.emplace(e.name, e);
  }
  return reg;
}

const std::map<std::string, ExampleDef, std::less<>>& registry() {
  static const auto reg = build_registry();
  return reg;
}

}  // namespace

const ExampleDef& example(std::string_view name) {
  const auto& reg = registry();
  auto it = reg.find(name);
  if (it == reg.end()) throw std::invalid_argument("unknown example '" + std::string(name) + "'");
  return it->second;
}

std::vector<std::string> example_names() {
  std::vector<std::string> names;
  for (const auto& [k, v] : registry()) names.push_back(k);
  return names;
}

double example_self_check(const ExampleDef& def, int samples) {
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    const Point x(uni(rng), uni(rng));
    const double f = def.data.f(x);
    const double det = def.data.exact_hessian(x).determinant();
    worst = std::max(worst, std::abs(det - f) / std::max(1.0, std::abs(f)));
  }
  return worst;
}

}  // namespace malsfem
