#pragma once

#include <vector>

#include <Eigen/Core>

#include "malsfem/mesh.hpp"
#include "malsfem/poly.hpp"

namespace malsfem {

/// Continuous P_m Lagrange space on a mesh. Nodes are numbered vertices
/// first, then edge-interior nodes face by face, then element-interior nodes.
class LagrangeSpace {
 public:
  /// The mesh must outlive the space.
  LagrangeSpace(const Mesh& mesh, int m);

  const Mesh& mesh() const { return *mesh_; }
  int degree() const { return basis_.degree(); }
  int num_nodes() const { return static_cast<int>(nodes_.size()); }
  const LagrangeBasis& basis() const { return basis_; }
  /// Global node ids of element k in the reference basis' lattice order.
  const std::vector<int>& element_nodes(int k) const { return element_nodes_[static_cast<std::size_t>(k)]; }
  const Point& node(int i) const { return nodes_[static_cast<std::size_t>(i)]; }
  bool is_boundary(int i) const { return boundary_[static_cast<std::size_t>(i)] != 0; }
  const std::vector<int>& boundary_nodes() const { return boundary_list_; }

  /// Reference coordinates of the physical point x in element k.
  Eigen::Vector2d reference_point(int k, const Point& x) const;
  /// Inverse transpose of the element Jacobian (maps reference to physical gradients).
  const Eigen::Matrix2d& inverse_jacobian_t(int k) const { return inv_jt_[static_cast<std::size_t>(k)]; }

 private:
  const Mesh* mesh_;
  LagrangeBasis basis_;
  std::vector<std::vector<int>> element_nodes_;
  std::vector<Point> nodes_;
  std::vector<char> boundary_;
  std::vector<int> boundary_list_;
  std::vector<Eigen::Matrix2d> inv_jt_;
};

/// Finite element function in a LagrangeSpace.
class ScalarField {
 public:
  ScalarField(const LagrangeSpace& space, Eigen::VectorXd values);

  const LagrangeSpace& space() const { return *space_; }
  const Eigen::VectorXd& values() const { return values_; }

  double value(int k, const Point& x) const;
  Eigen::Vector2d gradient(int k, const Point& x) const;

 private:
  const LagrangeSpace* space_;
  Eigen::VectorXd values_;
};

}  // namespace malsfem
