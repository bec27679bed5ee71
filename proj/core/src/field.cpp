#include "malsfem/field.hpp"

#include <stdexcept>

namespace malsfem {

PiecewiseField::PiecewiseField(std::shared_ptr<const std::vector<IrrotBasis>> bases,
                               std::vector<Eigen::VectorXd> coeffs)
    : bases_(std::move(bases)), coeffs_(std::move(coeffs)) {
  if (!bases_ || bases_->size() != coeffs_.size()) {
    throw std::invalid_argument("piecewise field: basis/coefficient count mismatch");
  }
}

void PiecewiseField::eval(int k, const Point& x, Eigen::Vector2d& value, Jac& jacobian) const {
  thread_local ValueMatrix v;
  thread_local JacMatrix j;
  basis(k).eval_into(x, v, j);
  const auto& c = coeffs(k);
  value = v.transpose() * c;
  jacobian = c.transpose() * j;
}

Eigen::Vector2d PiecewiseField::value(int k, const Point& x) const {
  Eigen::Vector2d v;
  Jac j;
  eval(k, x, v, j);
  return v;
}

Jac PiecewiseField::jacobian(int k, const Point& x) const {
  Eigen::Vector2d v;
  Jac j;
  eval(k, x, v, j);
  return j;
}

}  // namespace malsfem
