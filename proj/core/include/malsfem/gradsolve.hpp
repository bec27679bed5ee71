#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "malsfem/field.hpp"
#include "malsfem/lagrange.hpp"
#include "malsfem/problems.hpp"
#include "malsfem/recon.hpp"
#include "malsfem/sparse.hpp"

namespace malsfem {

/// cof([[a,b],[c,d]]) = [[d,-c],[-b,a]].
Eigen::Matrix2d cofactor2(const Eigen::Matrix2d& a);
/// Same, on the row-major flattened Jacobian.
inline Jac cofactor2(const Jac& a) {
  Jac c;
  c << a(3), -a(2), -a(1), a(0);
  return c;
}
inline double det2(const Jac& a) { return a(0) * a(3) - a(1) * a(2); }

struct NewtonConfig {
  double eta = 20.0;
  /// Stop when ||p^n - p^{n-1}||_l2 / ||p^{n-1}||_l2 < tol.
  double tol = 1e-10;
  int max_iter = 100;
  double linear_tol = 1e-12;
};

/// Quadrature degrees used by the gradient stage.
int volume_quad_degree(int m);
int face_quad_degree(int m);

struct NewtonStep {
  int iter = 0;
  double rel_increment = 0.0;
  int nonconvex = 0;
};

struct NewtonReport {
  std::vector<NewtonStep> steps;
  int initial_nonconvex = 0;
  bool converged = false;
  /// Set when the iteration stopped early (non-finite increment or a failed
  /// linear solve); holds the diagnostic.
  std::string failure;
  /// Largest |cof(W):W - 2 det W| / max(1, |det W|) seen at the volume
  /// quadrature points of all iterates that were linearized.
  double max_identity_defect = 0.0;
  Eigen::VectorXd dofs;

  int iterations() const { return static_cast<int>(steps.size()); }
};

class NewtonError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LinearSystem {
  SparseMatrix matrix;
  Eigen::VectorXd rhs;
};

/// Euler-Lagrange system of the least-squares functional linearized at the
/// Jacobian of `w`: volume term (cof(W):grad q)^2, interior jump penalty
/// (eta/h_e)|q+ - q-|^2, boundary tangential penalty (eta/h_e)(q x n - grad g x n)^2.
///
/// Reuses the penalty part, which does not depend on the iterate.
class NewtonAssembler {
 public:
  /// The space and data must outlive the assembler.
  NewtonAssembler(const TrialSpace& space, const ProblemData& data, const NewtonConfig& cfg);

  LinearSystem assemble(const PiecewiseField& w) const;
  /// Max identity defect of the last assemble() call.
  double last_identity_defect() const { return last_defect_; }
  /// Largest |cof(W)| entry over the quadrature points of the last call.
  double last_cofactor_scale() const { return last_cof_scale_; }

 private:
  const TrialSpace* space_;
  const ProblemData* data_;
  NewtonConfig cfg_;
  SparsePattern pattern_;
  SparseMatrix penalty_;
  Eigen::VectorXd boundary_rhs_;
  mutable double last_defect_ = 0.0;
  mutable double last_cof_scale_ = 0.0;
};

LinearSystem assemble_newton_system(const TrialSpace& space, const ProblemData& data,
                                    const PiecewiseField& w, const NewtonConfig& cfg);

/// Called after every Newton update with the iteration number and new iterate.
using NewtonObserver = std::function<void(int, const PiecewiseField&)>;

/// Full (undamped) Newton iteration. Non-convergence within max_iter is
/// reported through NewtonReport::converged. Throws NewtonError for a
/// degenerate linearization (cof of the iterate vanishing identically).
NewtonReport newton_solve(const TrialSpace& space, const ProblemData& data,
                          const Eigen::VectorXd& init, const NewtonConfig& cfg,
                          const NewtonObserver& observer = {});

/// Elements whose field Jacobian is not positive definite (det > 0 and
/// trace > 0 fails) at some volume quadrature point of the given degree.
int count_nonconvex(const PiecewiseField& p, const Mesh& mesh, int quad_degree);
std::vector<char> nonconvex_flags(const PiecewiseField& p, const Mesh& mesh, int quad_degree);

/// Solves Laplace(u) = 2 sqrt(f), u = g (nodal interpolation on the
/// boundary) in the continuous P_m space; returns nodal values.
Eigen::VectorXd poisson_solve(const LagrangeSpace& lagrange, const ProblemData& data);

/// Poisson initializer expressed as dofs of the trial space (element-wise
/// gradient of the P_m solution, interpolated into the space).
Eigen::VectorXd poisson_initializer(const TrialSpace& space, const ProblemData& data);

}  // namespace malsfem
