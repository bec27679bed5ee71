#pragma once

#include <array>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "malsfem/mesh.hpp"

namespace malsfem {

/// Jacobians of vector fields are stored row-major as [dq1/dx, dq1/dy, dq2/dx, dq2/dy].
using Jac = Eigen::Matrix<double, 1, 4>;
using ValueMatrix = Eigen::Matrix<double, Eigen::Dynamic, 2>;
using JacMatrix = Eigen::Matrix<double, Eigen::Dynamic, 4>;

inline Eigen::Matrix2d to_matrix(const Jac& j) {
  Eigen::Matrix2d a;
  a << j(0), j(1), j(2), j(3);
  return a;
}

/// Dimension of the irrotational polynomial space S^m in 2D.
constexpr int irrot_dim(int m) { return (m + 2) * (m + 3) / 2 - 1; }

/// Basis of S^m(D): gradients (in scaled coordinates) of the monomials
/// X^a Y^b, 1 <= a+b <= m+1, with X = (x - center_x)/scale, Y likewise.
///
/// Members are ordered by total degree, then by decreasing power of X, so
/// the first two are the constant fields (1,0) and (0,1) and every other
/// member vanishes at the center.
class IrrotBasis {
 public:
  IrrotBasis() = default;
  IrrotBasis(int m, const Point& center, double scale);

  int degree() const { return m_; }
  int size() const { return static_cast<int>(exponents_.size()); }
  const Point& center() const { return center_; }
  double scale() const { return scale_; }
  const std::vector<std::pair<int, int>>& exponents() const { return exponents_; }

  /// Row l holds member l evaluated at x.
  ValueMatrix eval(const Point& x) const;
  /// Row l holds the Jacobian of member l at x (symmetric).
  JacMatrix eval_jacobian(const Point& x) const;
  /// Both at once into preallocated storage (size() rows).
  void eval_into(const Point& x, ValueMatrix& values, JacMatrix& jacobians) const;

 private:
  int m_ = 0;
  Point center_ = Point::Zero();
  double scale_ = 1.0;
  std::vector<std::pair<int, int>> exponents_;
};

IrrotBasis irrot_basis(int m, const Point& center, double scale);

/// Nodal basis of P_m (1 <= m <= 3) on the reference triangle at the
/// principal lattice points (i/m, j/m), i + j <= m.
class LagrangeBasis {
 public:
  explicit LagrangeBasis(int m);

  int degree() const { return m_; }
  int size() const { return static_cast<int>(nodes_.size()); }
  /// Lattice indices (i, j) of node l; the node sits at (i/m, j/m).
  const std::vector<std::array<int, 2>>& lattice() const { return lattice_; }
  const std::vector<Eigen::Vector2d>& nodes() const { return nodes_; }

  Eigen::VectorXd eval(const Eigen::Vector2d& xi) const;
  /// Reference gradients, one row per basis function.
  ValueMatrix grad(const Eigen::Vector2d& xi) const;

 private:
  int m_;
  std::vector<std::array<int, 2>> lattice_;
  std::vector<Eigen::Vector2d> nodes_;
  std::vector<std::array<int, 2>> monomials_;
  Eigen::MatrixXd coeffs_;  // column l: monomial coefficients of basis function l
};

LagrangeBasis lagrange_basis(int m);

}  // namespace malsfem
