#include "malsfem/lagrange.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/LU>

namespace malsfem {

LagrangeSpace::LagrangeSpace(const Mesh& mesh, int m) : mesh_(&mesh), basis_(m) {
  const int nv = mesh.num_vertices();
  const int nf = mesh.num_faces();
  const int per_edge = m - 1;
  const int per_cell = (m - 1) * (m - 2) / 2;
  const int total = nv + nf * per_edge + mesh.num_elements() * per_cell;
  nodes_.resize(static_cast<std::size_t>(total));
  boundary_.assign(static_cast<std::size_t>(total), 0);
  element_nodes_.resize(static_cast<std::size_t>(mesh.num_elements()));
  inv_jt_.resize(static_cast<std::size_t>(mesh.num_elements()));

  for (int k = 0; k < mesh.num_elements(); ++k) {
    const auto& tri = mesh.element(k);
    const auto p = mesh.element_vertices(k);
    Eigen::Matrix2d B;
    B.col(0) = p[1] - p[0];
    B.col(1) = p[2] - p[0];
    inv_jt_[static_cast<std::size_t>(k)] = B.inverse().transpose();

    auto& ids = element_nodes_[static_cast<std::size_t>(k)];
    int interior = 0;
    for (const auto& [i, j] : basis_.lattice()) {
      const std::array<int, 3> bary{m - i - j, i, j};  // times m
      const int zeros = (bary[0] == 0) + (bary[1] == 0) + (bary[2] == 0);
      int gid = -1;
      if (zeros == 2) {
        const int local = bary[0] != 0 ? 0 : (bary[1] != 0 ? 1 : 2);
        gid = tri[static_cast<std::size_t>(local)];
      } else if (zeros == 1) {
        const int missing = bary[0] == 0 ? 0 : (bary[1] == 0 ? 1 : 2);
        // local edge i joins vertices i and i+1; the edge avoiding vertex v is (v+1)%3
        const int edge = (missing + 1) % 3;
        const int e = mesh.element_faces(k)[static_cast<std::size_t>(edge)];
        const int far_vertex = mesh.face(e).vertices[1];
        int steps = 0;
        for (int l = 0; l < 3; ++l) {
          if (tri[static_cast<std::size_t>(l)] == far_vertex) steps = bary[static_cast<std::size_t>(l)];
        }
        gid = nv + e * per_edge + (steps - 1);
      } else {
        gid = nv + nf * per_edge + k * per_cell + interior++;
      }
      ids.push_back(gid);
      const double l1 = static_cast<double>(i) / m;
      const double l2 = static_cast<double>(j) / m;
      nodes_[static_cast<std::size_t>(gid)] = p[0] + l1 * (p[1] - p[0]) + l2 * (p[2] - p[0]);
    }
  }

  for (int e = 0; e < nf; ++e) {
    const Face& f = mesh.face(e);
    if (!f.boundary()) continue;
    boundary_[static_cast<std::size_t>(f.vertices[0])] = 1;
    boundary_[static_cast<std::size_t>(f.vertices[1])] = 1;
    for (int s = 0; s < per_edge; ++s) boundary_[static_cast<std::size_t>(nv + e * per_edge + s)] = 1;
  }
  for (int i = 0; i < total; ++i) {
    if (boundary_[static_cast<std::size_t>(i)]) boundary_list_.push_back(i);
  }
}

Eigen::Vector2d LagrangeSpace::reference_point(int k, const Point& x) const {
  const auto p = mesh_->element_vertices(k);
  return inv_jt_[static_cast<std::size_t>(k)].transpose() * (x - p[0]);
}

ScalarField::ScalarField(const LagrangeSpace& space, Eigen::VectorXd values)
    : space_(&space), values_(std::move(values)) {
  if (values_.size() != space.num_nodes()) {
    throw std::invalid_argument("scalar field: value count does not match the node count");
  }
}

double ScalarField::value(int k, const Point& x) const {
  const Eigen::VectorXd phi = space_->basis().eval(space_->reference_point(k, x));
  const auto& ids = space_->element_nodes(k);
  double v = 0.0;
  for (std::size_t i = 0; i < ids.size(); ++i) v += phi(static_cast<Eigen::Index>(i)) * values_(ids[i]);
  return v;
}

Eigen::Vector2d ScalarField::gradient(int k, const Point& x) const {
  const ValueMatrix dphi = space_->basis().grad(space_->reference_point(k, x));
  const auto& ids = space_->element_nodes(k);
  Eigen::Vector2d g = Eigen::Vector2d::Zero();
  for (std::size_t i = 0; i < ids.size(); ++i) {
    g += values_(ids[i]) * dphi.row(static_cast<Eigen::Index>(i)).transpose();
  }
  return space_->inverse_jacobian_t(k) * g;
}

}  // namespace malsfem
