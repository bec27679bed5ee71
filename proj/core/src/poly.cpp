#include "malsfem/poly.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/LU>

namespace malsfem {

IrrotBasis::IrrotBasis(int m, const Point& center, double scale)
    : m_(m), center_(center), scale_(scale) {
  if (m < 1) throw std::invalid_argument("irrotational basis needs m >= 1, got " + std::to_string(m));
  if (m > 12) throw std::invalid_argument("irrotational basis supports m <= 12");
  if (!(scale > 0.0)) throw std::invalid_argument("irrotational basis needs a positive scale");
  for (int d = 1; d <= m + 1; ++d) {
    for (int a = d; a >= 0; --a) exponents_.emplace_back(a, d - a);
  }
}

IrrotBasis irrot_basis(int m, const Point& center, double scale) {
  return IrrotBasis(m, center, scale);
}

void IrrotBasis::eval_into(const Point& x, ValueMatrix& values, JacMatrix& jacobians) const {
  const int n = size();
  values.resize(n, 2);
  jacobians.resize(n, 4);
  const double X = (x.x() - center_.x()) / scale_;
  const double Y = (x.y() - center_.y()) / scale_;
  // px[k] = X^k for k <= m+1; index shifted by 2 so negative powers read as 0
  std::array<double, 16> px{};
  std::array<double, 16> py{};
  px[2] = 1.0;
  py[2] = 1.0;
  for (int k = 1; k <= m_ + 1; ++k) {
    px[static_cast<std::size_t>(k + 2)] = px[static_cast<std::size_t>(k + 1)] * X;
    py[static_cast<std::size_t>(k + 2)] = py[static_cast<std::size_t>(k + 1)] * Y;
  }
  auto X_ = [&](int k) { return px[static_cast<std::size_t>(k + 2)]; };
  auto Y_ = [&](int k) { return py[static_cast<std::size_t>(k + 2)]; };
  const double inv = 1.0 / scale_;
  for (int l = 0; l < n; ++l) {
    const auto [a, b] = exponents_[static_cast<std::size_t>(l)];
    values(l, 0) = a * X_(a - 1) * Y_(b);
    values(l, 1) = b * X_(a) * Y_(b - 1);
    const double xx = a * (a - 1) * X_(a - 2) * Y_(b) * inv;
    const double xy = a * b * X_(a - 1) * Y_(b - 1) * inv;
    const double yy = b * (b - 1) * X_(a) * Y_(b - 2) * inv;
    jacobians(l, 0) = xx;
    jacobians(l, 1) = xy;
    jacobians(l, 2) = xy;
    jacobians(l, 3) = yy;
  }
}

ValueMatrix IrrotBasis::eval(const Point& x) const {
  ValueMatrix v;
  JacMatrix j;
  eval_into(x, v, j);
  return v;
}

JacMatrix IrrotBasis::eval_jacobian(const Point& x) const {
  ValueMatrix v;
  JacMatrix j;
  eval_into(x, v, j);
  return j;
}

LagrangeBasis::LagrangeBasis(int m) : m_(m) {
  if (m < 1 || m > 3) throw std::invalid_argument("Lagrange degree must be 1..3, got " + std::to_string(m));
  for (int j = 0; j <= m; ++j) {
    for (int i = 0; i + j <= m; ++i) {
      lattice_.push_back({i, j});
      nodes_.emplace_back(static_cast<double>(i) / m, static_cast<double>(j) / m);
    }
  }
  for (int d = 0; d <= m; ++d) {
    for (int a = d; a >= 0; --a) monomials_.push_back({a, d - a});
  }
  const int n = size();
  Eigen::MatrixXd vandermonde(n, n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const auto [a, b] = monomials_[static_cast<std::size_t>(c)];
      vandermonde(r, c) = std::pow(nodes_[static_cast<std::size_t>(r)].x(), a) *
                          std::pow(nodes_[static_cast<std::size_t>(r)].y(), b);
    }
  }
  coeffs_ = vandermonde.fullPivLu().inverse();
}

LagrangeBasis lagrange_basis(int m) { return LagrangeBasis(m); }

Eigen::VectorXd LagrangeBasis::eval(const Eigen::Vector2d& xi) const {
  const int n = size();
  Eigen::VectorXd mono(n);
  for (int c = 0; c < n; ++c) {
    const auto [a, b] = monomials_[static_cast<std::size_t>(c)];
    mono(c) = std::pow(xi.x(), a) * std::pow(xi.y(), b);
  }
  return coeffs_.transpose() * mono;
}

ValueMatrix LagrangeBasis::grad(const Eigen::Vector2d& xi) const {
  const int n = size();
  Eigen::MatrixX2d dmono(n, 2);
  for (int c = 0; c < n; ++c) {
    const auto [a, b] = monomials_[static_cast<std::size_t>(c)];
    dmono(c, 0) = a == 0 ? 0.0 : a * std::pow(xi.x(), a - 1) * std::pow(xi.y(), b);
    dmono(c, 1) = b == 0 ? 0.0 : b * std::pow(xi.x(), a) * std::pow(xi.y(), b - 1);
  }
  return coeffs_.transpose() * dmono;
}

}  // namespace malsfem
