#pragma once

#include <iosfwd>
#include <memory>
#include <vector>

#include <Eigen/Core>

#include "malsfem/field.hpp"
#include "malsfem/mesh.hpp"
#include "malsfem/poly.hpp"

namespace malsfem {

/// Default patch sizes #S(K) for m = 1, 2, 3; other m fall back to dim S^m.
int default_patch_size(int m);

/// Element patch S(K) and its collocation points I(K). The owner comes first.
struct ElementPatch {
  int owner = -1;
  int threshold = 0;
  std::vector<int> elements;
  std::vector<Point> points;
};

/// Grows face-neighbour rings around K until at least `threshold` elements
/// are collected, then keeps the `threshold` elements whose barycenters are
/// nearest to x_K. Equidistant candidates are ordered by element id.
ElementPatch build_patch(const Mesh& mesh, int k, int threshold);

/// Restriction of a trial space to one element: the local basis plus the
/// matrix taking the element's global degrees of freedom to coefficients in
/// that basis (basis.size() x dofs.size()).
struct LocalExpansion {
  std::vector<int> dofs;
  Eigen::MatrixXd coeffs;
};

/// Patch reconstruction operator R: piecewise constant vector data sampled at
/// barycenters -> piecewise irrotational polynomials of degree m.
///
/// On each element K the constrained least-squares fit over I(K) is stored as
/// a matrix of shape dim S^m x (2 |S(K)|) acting on the stacked values
/// (g1, g2) at the patch barycenters.
class ReconOp {
 public:
  const Mesh& mesh() const { return *mesh_; }
  int degree() const { return m_; }
  int threshold() const { return threshold_; }
  int num_elements() const { return static_cast<int>(patches_.size()); }

  const ElementPatch& patch(int k) const { return patches_[static_cast<std::size_t>(k)]; }
  const IrrotBasis& basis(int k) const { return (*bases_)[static_cast<std::size_t>(k)]; }
  const std::shared_ptr<const std::vector<IrrotBasis>>& bases() const { return bases_; }
  const Eigen::MatrixXd& matrix(int k) const { return matrices_[static_cast<std::size_t>(k)]; }
  /// Ratio of largest to smallest pivot of the local factorization.
  double condition(int k) const { return condition_[static_cast<std::size_t>(k)]; }

  /// Rg for dofs laid out as (g1, g2) per element.
  PiecewiseField apply(const Eigen::VectorXd& dofs) const;

  /// CSV: element,patch_size,condition
  void dump(std::ostream& out) const;

 private:
  friend ReconOp build_recon_op(const Mesh&, int, int);

  const Mesh* mesh_ = nullptr;
  int m_ = 0;
  int threshold_ = 0;
  std::vector<ElementPatch> patches_;
  std::shared_ptr<const std::vector<IrrotBasis>> bases_;
  std::vector<Eigen::MatrixXd> matrices_;
  std::vector<double> condition_;
};

/// Throws std::runtime_error naming the element if a local problem is rank
/// deficient (collocation points unisolvent assumption violated).
ReconOp build_recon_op(const Mesh& mesh, int m, int threshold);

enum class SpaceKind { reconstructed, plain };

/// Trial space for the gradient: the reconstructed space U_h^m (two values
/// per element) or the plain piecewise irrotational space S_h^m (dim S^m
/// coefficients per element).
class TrialSpace {
 public:
  /// The reconstruction operator must outlive the space.
  static TrialSpace reconstructed(const ReconOp& op);
  static TrialSpace plain(const Mesh& mesh, int m);

  SpaceKind kind() const { return kind_; }
  int degree() const { return m_; }
  int num_dofs() const { return num_dofs_; }
  const Mesh& mesh() const { return *mesh_; }
  const IrrotBasis& basis(int k) const { return (*bases_)[static_cast<std::size_t>(k)]; }
  const LocalExpansion& local(int k) const { return locals_[static_cast<std::size_t>(k)]; }

  PiecewiseField field(const Eigen::VectorXd& dofs) const;

  /// U_h^m: g at barycenters. S_h^m: element-wise L2 projection onto S^m(K).
  Eigen::VectorXd interpolate(const VectorFn& g) const;
  Eigen::VectorXd interpolate(const ElementVectorFn& g) const;

 private:
  SpaceKind kind_ = SpaceKind::reconstructed;
  int m_ = 0;
  int num_dofs_ = 0;
  const Mesh* mesh_ = nullptr;
  std::shared_ptr<const std::vector<IrrotBasis>> bases_;
  std::vector<LocalExpansion> locals_;
};

}  // namespace malsfem
