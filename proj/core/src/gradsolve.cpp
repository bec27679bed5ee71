#include "malsfem/gradsolve.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "malsfem/quadrature.hpp"

namespace malsfem {

Eigen::Matrix2d cofactor2(const Eigen::Matrix2d& a) {
  Eigen::Matrix2d c;
  c << a(1, 1), -a(1, 0), -a(0, 1), a(0, 0);
  return c;
}

int volume_quad_degree(int m) { return std::min(kMaxQuadDegree, std::max(4 * m, 2 * m + 2)); }
int face_quad_degree(int m) { return std::min(kMaxQuadDegree, 2 * m + 2); }

namespace {

// Union of the two sides' dofs plus, for each side, the position of its
// local dofs inside the union.
struct FaceDofs {
  std::vector<int> dofs;
  std::vector<int> left_pos;
  std::vector<int> right_pos;
};

FaceDofs face_dofs(const LocalExpansion& left, const LocalExpansion* right) {
  FaceDofs fd;
  fd.dofs = left.dofs;
  if (right) fd.dofs.insert(fd.dofs.end(), right->dofs.begin(), right->dofs.end());
  std::sort(fd.dofs.begin(), fd.dofs.end());
  fd.dofs.erase(std::unique(fd.dofs.begin(), fd.dofs.end()), fd.dofs.end());
  auto pos = [&](int d) {
    return static_cast<int>(std::lower_bound(fd.dofs.begin(), fd.dofs.end(), d) - fd.dofs.begin());
  };
  for (int d : left.dofs) fd.left_pos.push_back(pos(d));
  if (right) {
    for (int d : right->dofs) fd.right_pos.push_back(pos(d));
  }
  return fd;
}

}  // namespace

NewtonAssembler::NewtonAssembler(const TrialSpace& space, const ProblemData& data, const NewtonConfig& cfg)
    : space_(&space), data_(&data), cfg_(cfg) {
  if (!(cfg.eta > 0.0)) throw std::invalid_argument("penalty eta must be positive");
  const Mesh& mesh = space.mesh();
  const int m = space.degree();

  std::vector<std::vector<int>> groups;
  groups.reserve(static_cast<std::size_t>(mesh.num_elements() + mesh.num_faces()));
  for (int k = 0; k < mesh.num_elements(); ++k) groups.push_back(space.local(k).dofs);
  std::vector<FaceDofs> faces;
  faces.reserve(static_cast<std::size_t>(mesh.num_faces()));
  for (int e = 0; e < mesh.num_faces(); ++e) {
    const Face& f = mesh.face(e);
    faces.push_back(face_dofs(space.local(f.left), f.boundary() ? nullptr : &space.local(f.right)));
    if (!f.boundary()) groups.push_back(faces.back().dofs);
  }
  pattern_ = SparsePattern(space.num_dofs(), groups);
  groups.clear();

  penalty_ = pattern_.zero();
  boundary_rhs_ = Eigen::VectorXd::Zero(space.num_dofs());
  const QuadRule& rule = quadrature(QuadKind::segment, face_quad_degree(m));
  ValueMatrix v;
  JacMatrix j;
  for (int e = 0; e < mesh.num_faces(); ++e) {
    const Face& f = mesh.face(e);
    const FaceGeometry geo = mesh.face_trace_geometry(e);
    const MappedRule q = map_segment(rule, geo.a, geo.b);
    const FaceDofs& fd = faces[static_cast<std::size_t>(e)];
    const int nu = static_cast<int>(fd.dofs.size());
    const double weight = cfg.eta / geo.length;
    Eigen::MatrixXd local = Eigen::MatrixXd::Zero(nu, nu);
    const LocalExpansion& L = space.local(f.left);
    if (f.boundary()) {
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nu);
      for (std::size_t i = 0; i < q.points.size(); ++i) {
        space.basis(f.left).eval_into(q.points[i], v, j);
        const ValueMatrix shape = L.coeffs.transpose() * v;  // nd x 2
        Eigen::VectorXd t = Eigen::VectorXd::Zero(nu);
        for (std::size_t a = 0; a < fd.left_pos.size(); ++a) {
          const auto r = static_cast<Eigen::Index>(a);
          t(fd.left_pos[a]) = shape(r, 0) * geo.normal.y() - shape(r, 1) * geo.normal.x();
        }
        const double wq = q.weights[i] * weight;
        local.noalias() += wq * t * t.transpose();
        rhs += wq * cross(data_->grad_g(q.points[i]), geo.normal) * t;
      }
      for (int a = 0; a < nu; ++a) boundary_rhs_(fd.dofs[static_cast<std::size_t>(a)]) += rhs(a);
    } else {
      const LocalExpansion& R = space.local(f.right);
      Eigen::MatrixXd jump(nu, 2);
      for (std::size_t i = 0; i < q.points.size(); ++i) {
        jump.setZero();
        space.basis(f.left).eval_into(q.points[i], v, j);
        const ValueMatrix sl = L.coeffs.transpose() * v;
        for (std::size_t a = 0; a < fd.left_pos.size(); ++a) jump.row(fd.left_pos[a]) += sl.row(static_cast<Eigen::Index>(a));
        space.basis(f.right).eval_into(q.points[i], v, j);
        const ValueMatrix sr = R.coeffs.transpose() * v;
        for (std::size_t a = 0; a < fd.right_pos.size(); ++a) jump.row(fd.right_pos[a]) -= sr.row(static_cast<Eigen::Index>(a));
        local.noalias() += (q.weights[i] * weight) * jump * jump.transpose();
      }
    }
    SparsePattern::add(penalty_, fd.dofs, local);
  }
}

LinearSystem NewtonAssembler::assemble(const PiecewiseField& w) const {
  const TrialSpace& space = *space_;
  const Mesh& mesh = space.mesh();
  LinearSystem sys{penalty_, boundary_rhs_};
  const QuadRule& rule = quadrature(QuadKind::triangle, volume_quad_degree(space.degree()));
  ValueMatrix v;
  JacMatrix j;
  double defect = 0.0;
  double cof_scale = 0.0;
  for (int k = 0; k < mesh.num_elements(); ++k) {
    const LocalExpansion& loc = space.local(k);
    const int nd = static_cast<int>(loc.dofs.size());
    const MappedRule q = map_triangle(rule, mesh.element_vertices(k));
    Eigen::MatrixXd local = Eigen::MatrixXd::Zero(nd, nd);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nd);
    for (std::size_t i = 0; i < q.points.size(); ++i) {
      const Point& x = q.points[i];
      space.basis(k).eval_into(x, v, j);
      const JacMatrix shape_jac = loc.coeffs.transpose() * j;  // nd x 4
      const Jac W = w.jacobian(k, x);
      const Jac cof = cofactor2(W);
      const double det = det2(W);
      const double cof_w = cof.dot(W);
      defect = std::max(defect, std::abs(cof_w - 2.0 * det) / std::max(1.0, std::abs(det)));
      cof_scale = std::max(cof_scale, cof.cwiseAbs().maxCoeff());
      const double fx = data_->f(x);
      if (!(fx > 0.0)) {
        throw NewtonError("source f is not strictly positive at a quadrature point of element " +
                          std::to_string(k));
      }
      const double load = fx - det + cof_w;
      if (!std::isfinite(load)) {
        throw NewtonError("non-finite load at element " + std::to_string(k));
      }
      const Eigen::VectorXd g = shape_jac * cof.transpose();
      local.noalias() += q.weights[i] * g * g.transpose();
      rhs.noalias() += (q.weights[i] * load) * g;
    }
    SparsePattern::add(sys.matrix, loc.dofs, local);
    for (int a = 0; a < nd; ++a) sys.rhs(loc.dofs[static_cast<std::size_t>(a)]) += rhs(a);
  }
  last_defect_ = defect;
  last_cof_scale_ = cof_scale;
  return sys;
}

LinearSystem assemble_newton_system(const TrialSpace& space, const ProblemData& data,
                                    const PiecewiseField& w, const NewtonConfig& cfg) {
  return NewtonAssembler(space, data, cfg).assemble(w);
}

std::vector<char> nonconvex_flags(const PiecewiseField& p, const Mesh& mesh, int quad_degree) {
  const QuadRule& rule = quadrature(QuadKind::triangle, quad_degree);
  std::vector<char> flags(static_cast<std::size_t>(mesh.num_elements()), 0);
  for (int k = 0; k < mesh.num_elements(); ++k) {
    const MappedRule q = map_triangle(rule, mesh.element_vertices(k));
    for (const Point& x : q.points) {
      const Jac J = p.jacobian(k, x);
      if (!(det2(J) > 0.0 && J(0) + J(3) > 0.0)) {
        flags[static_cast<std::size_t>(k)] = 1;
        break;
      }
    }
  }
  return flags;
}

int count_nonconvex(const PiecewiseField& p, const Mesh& mesh, int quad_degree) {
  const auto flags = nonconvex_flags(p, mesh, quad_degree);
  return static_cast<int>(std::count(flags.begin(), flags.end(), 1));
}

NewtonReport newton_solve(const TrialSpace& space, const ProblemData& data,
                          const Eigen::VectorXd& init, const NewtonConfig& cfg,
                          const NewtonObserver& observer) {
  if (init.size() != space.num_dofs()) {
    throw std::invalid_argument("newton_solve: initial vector has " + std::to_string(init.size()) +
                                " entries, space has " + std::to_string(space.num_dofs()) + " dofs");
  }
  if (!(cfg.tol > 0.0)) throw std::invalid_argument("newton_solve: tol must be positive");
  const Mesh& mesh = space.mesh();
  const int qdeg = volume_quad_degree(space.degree());
  NewtonAssembler assembler(space, data, cfg);
  SpdSolver solver(cfg.linear_tol);

  NewtonReport report;
  Eigen::VectorXd dofs = init;
  PiecewiseField field = space.field(dofs);
  report.initial_nonconvex = count_nonconvex(field, mesh, qdeg);

  for (int it = 1; it <= cfg.max_iter; ++it) {
    LinearSystem sys = assembler.assemble(field);
    report.max_identity_defect = std::max(report.max_identity_defect, assembler.last_identity_defect());
    if (assembler.last_cofactor_scale() == 0.0) {
      throw NewtonError("Newton iteration " + std::to_string(it) +
                        ": cofactor of the iterate vanishes everywhere (degenerate initial guess); "
                        "start from the Poisson initializer instead");
    }
    std::string err;
    auto next = solver.solve(sys.matrix, sys.rhs, &err);
    if (!next) {
      report.failure = "Newton iteration " + std::to_string(it) + ": linear solve failed: " + err;
      break;
    }
    const double base = dofs.norm();
    const double incr = (*next - dofs).norm() / (base > 0.0 ? base : 1.0);
    dofs = std::move(*next);
    field = space.field(dofs);
    report.steps.push_back({it, incr, count_nonconvex(field, mesh, qdeg)});
    if (observer) observer(it, field);
    if (!std::isfinite(incr)) {
      report.failure = "Newton iteration " + std::to_string(it) + ": non-finite increment";
      break;
    }
    if (incr < cfg.tol) {
      report.converged = true;
      break;
    }
  }
  report.dofs = std::move(dofs);
  return report;
}

Eigen::VectorXd poisson_solve(const LagrangeSpace& lagrange, const ProblemData& data) {
  const Mesh& mesh = lagrange.mesh();
  const int m = lagrange.degree();
  const int n = lagrange.num_nodes();
  const LagrangeBasis& basis = lagrange.basis();
  const QuadRule& rule = quadrature(QuadKind::triangle, std::min(kMaxQuadDegree, 2 * m + 2));

  Eigen::VectorXd bvals = Eigen::VectorXd::Zero(n);
  for (int i : lagrange.boundary_nodes()) bvals(i) = data.g(lagrange.node(i));

  std::vector<std::vector<int>> groups;
  for (int k = 0; k < mesh.num_elements(); ++k) groups.push_back(lagrange.element_nodes(k));
  SparsePattern pattern(n, groups);
  SparseMatrix a = pattern.zero();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);

  std::vector<ValueMatrix> ref_grads;
  std::vector<Eigen::VectorXd> ref_vals;
  for (const auto& xi : rule.points) {
    ref_grads.push_back(basis.grad(xi));
    ref_vals.push_back(basis.eval(xi));
  }
  const int nl = basis.size();
  for (int k = 0; k < mesh.num_elements(); ++k) {
    const auto& ids = lagrange.element_nodes(k);
    const MappedRule q = map_triangle(rule, mesh.element_vertices(k));
    Eigen::MatrixXd local = Eigen::MatrixXd::Zero(nl, nl);
    Eigen::VectorXd load = Eigen::VectorXd::Zero(nl);
    for (std::size_t i = 0; i < q.points.size(); ++i) {
      const ValueMatrix grads = ref_grads[i] * lagrange.inverse_jacobian_t(k).transpose();
      local.noalias() += q.weights[i] * grads * grads.transpose();
      // -Laplace(u) = -2 sqrt(f)
      load -= q.weights[i] * 2.0 * std::sqrt(data.f(q.points[i])) * ref_vals[i];
    }
    // strong Dirichlet values: eliminate boundary columns, identity rows
    Eigen::MatrixXd reduced = local;
    for (int r = 0; r < nl; ++r) {
      const int gr = ids[static_cast<std::size_t>(r)];
      if (lagrange.is_boundary(gr)) {
        reduced.row(r).setZero();
        continue;
      }
      for (int c = 0; c < nl; ++c) {
        const int gc = ids[static_cast<std::size_t>(c)];
        if (lagrange.is_boundary(gc)) {
          load(r) -= local(r, c) * bvals(gc);
          reduced(r, c) = 0.0;
        }
      }
      rhs(gr) += load(r);
    }
    SparsePattern::add(a, ids, reduced);
  }
  for (int i : lagrange.boundary_nodes()) {
    a.coeffRef(i, i) = 1.0;
    rhs(i) = bvals(i);
  }
  SpdSolver solver;
  std::string err;
  auto u = solver.solve(a, rhs, &err);
  if (!u) throw NewtonError("Poisson initializer: " + err);
  return *u;
}

Eigen::VectorXd poisson_initializer(const TrialSpace& space, const ProblemData& data) {
  LagrangeSpace lagrange(space.mesh(), std::min(space.degree(), 3));
  const ScalarField u0(lagrange, poisson_solve(lagrange, data));
  return space.interpolate(ElementVectorFn([&u0](int k, const Point& x) { return u0.gradient(k, x); }));
}

}  // namespace malsfem
