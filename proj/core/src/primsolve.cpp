#include "malsfem/primsolve.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "malsfem/quadrature.hpp"
#include "malsfem/sparse.hpp"

namespace malsfem {

ScalarField solve_primitive(const LagrangeSpace& space, const ElementVectorFn& p, const ProblemData& data) {
  const Mesh& mesh = space.mesh();
  const int m = space.degree();
  const int n = space.num_nodes();
  const LagrangeBasis& basis = space.basis();
  const int nl = basis.size();
  const double inv_h = 1.0 / mesh.h();
  const QuadRule& vol = quadrature(QuadKind::triangle, std::min(kMaxQuadDegree, 2 * m + 2));
  const QuadRule& seg = quadrature(QuadKind::segment, std::min(kMaxQuadDegree, 2 * m + 2));

  std::vector<std::vector<int>> groups;
  for (int k = 0; k < mesh.num_elements(); ++k) groups.push_back(space.element_nodes(k));
  SparsePattern pattern(n, groups);
  SparseMatrix a = pattern.zero();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);

  std::vector<ValueMatrix> ref_grads;
  for (const auto& xi : vol.points) ref_grads.push_back(basis.grad(xi));
  for (int k = 0; k < mesh.num_elements(); ++k) {
    const auto& ids = space.element_nodes(k);
    const MappedRule q = map_triangle(vol, mesh.element_vertices(k));
    Eigen::MatrixXd local = Eigen::MatrixXd::Zero(nl, nl);
    Eigen::VectorXd load = Eigen::VectorXd::Zero(nl);
    for (std::size_t i = 0; i < q.points.size(); ++i) {
      const ValueMatrix grads = ref_grads[i] * space.inverse_jacobian_t(k).transpose();
      local.noalias() += q.weights[i] * grads * grads.transpose();
      load.noalias() += q.weights[i] * grads * p(k, q.points[i]);
    }
    SparsePattern::add(a, ids, local);
    for (int r = 0; r < nl; ++r) rhs(ids[static_cast<std::size_t>(r)]) += load(r);
  }

  for (int e = 0; e < mesh.num_faces(); ++e) {
    const Face& f = mesh.face(e);
    if (!f.boundary()) continue;
    const int k = f.left;
    const auto& ids = space.element_nodes(k);
    const FaceGeometry geo = mesh.face_trace_geometry(e);
    const MappedRule q = map_segment(seg, geo.a, geo.b);
    Eigen::MatrixXd local = Eigen::MatrixXd::Zero(nl, nl);
    Eigen::VectorXd load = Eigen::VectorXd::Zero(nl);
    for (std::size_t i = 0; i < q.points.size(); ++i) {
      const Eigen::VectorXd phi = basis.eval(space.reference_point(k, q.points[i]));
      const double w = q.weights[i] * inv_h;
      local.noalias() += w * phi * phi.transpose();
      load += w * data.g(q.points[i]) * phi;
    }
    SparsePattern::add(a, ids, local);
    for (int r = 0; r < nl; ++r) rhs(ids[static_cast<std::size_t>(r)]) += load(r);
  }

  SpdSolver solver;
  std::string err;
  auto u = solver.solve(a, rhs, &err);
  if (!u) throw std::runtime_error("primitive solve: " + err);
  return ScalarField(space, std::move(*u));
}

ScalarField solve_primitive(const LagrangeSpace& space, const PiecewiseField& p, const ProblemData& data) {
  return solve_primitive(space, ElementVectorFn([&p](int k, const Point& x) { return p.value(k, x); }), data);
}

}  // namespace malsfem
