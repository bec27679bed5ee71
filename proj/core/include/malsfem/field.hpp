#pragma once

#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Core>

#include "malsfem/poly.hpp"

namespace malsfem {

using ScalarFn = std::function<double(const Point&)>;
using VectorFn = std::function<Eigen::Vector2d(const Point&)>;
using MatrixFn = std::function<Eigen::Matrix2d(const Point&)>;
/// Vector field that may differ element by element (e.g. a broken gradient).
using ElementVectorFn = std::function<Eigen::Vector2d(int, const Point&)>;

/// Piecewise irrotational polynomial vector field: one local basis and
/// coefficient vector per element.
class PiecewiseField {
 public:
  PiecewiseField() = default;
  PiecewiseField(std::shared_ptr<const std::vector<IrrotBasis>> bases,
                 std::vector<Eigen::VectorXd> coeffs);

  int num_elements() const { return static_cast<int>(coeffs_.size()); }
  const IrrotBasis& basis(int k) const { return (*bases_)[static_cast<std::size_t>(k)]; }
  const Eigen::VectorXd& coeffs(int k) const { return coeffs_[static_cast<std::size_t>(k)]; }

  Eigen::Vector2d value(int k, const Point& x) const;
  Jac jacobian(int k, const Point& x) const;
  void eval(int k, const Point& x, Eigen::Vector2d& value, Jac& jacobian) const;

 private:
  std::shared_ptr<const std::vector<IrrotBasis>> bases_;
  std::vector<Eigen::VectorXd> coeffs_;
};

}  // namespace malsfem
