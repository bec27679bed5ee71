#pragma once

#include <Eigen/Core>

#include "malsfem/field.hpp"
#include "malsfem/lagrange.hpp"
#include "malsfem/problems.hpp"

namespace malsfem {

/// Recovers u from a gradient approximation by minimizing
///   sum_K ||grad v - p||^2_K + sum_{e on boundary} (1/h) ||v - g||^2_e
/// over the continuous P_m space (h is the global mesh size).
ScalarField solve_primitive(const LagrangeSpace& space, const ElementVectorFn& p, const ProblemData& data);
ScalarField solve_primitive(const LagrangeSpace& space, const PiecewiseField& p, const ProblemData& data);

}  // namespace malsfem
