#include "malsfem/recon.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>
#include <tuple>

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include "malsfem/quadrature.hpp"

namespace malsfem {

int default_patch_size(int m) {
  switch (m) {
    case 1: return 5;
    case 2: return 9;
    case 3: return 14;
    default: return irrot_dim(m);
  }
}

ElementPatch build_patch(const Mesh& mesh, int k, int threshold) {
  if (k < 0 || k >= mesh.num_elements()) {
    throw std::invalid_argument("build_patch: element id " + std::to_string(k) + " out of range");
  }
  if (threshold < 1 || threshold > mesh.num_elements()) {
    throw std::invalid_argument("build_patch: threshold " + std::to_string(threshold) +
                                " not in [1, " + std::to_string(mesh.num_elements()) + "]");
  }
  std::vector<int> collected{k};
  std::vector<char> seen(static_cast<std::size_t>(mesh.num_elements()), 0);
  seen[static_cast<std::size_t>(k)] = 1;
  std::vector<int> frontier{k};
  while (static_cast<int>(collected.size()) < threshold) {
    std::vector<int> next;
    for (int e : frontier) {
      for (int nb : mesh.neighbors(e)) {
        if (seen[static_cast<std::size_t>(nb)]) continue;
        seen[static_cast<std::size_t>(nb)] = 1;
        next.push_back(nb);
      }
    }
    if (next.empty()) {
      throw std::runtime_error("build_patch: mesh component around element " + std::to_string(k) +
                               " has fewer than " + std::to_string(threshold) + " elements");
    }
    collected.insert(collected.end(), next.begin(), next.end());
    frontier = std::move(next);
  }

  // Distances are quantized so that geometrically equal distances compare
  // equal and the id decides, independent of rounding.
  const Point& xk = mesh.barycenter(k);
  const double unit = 1e-10 * mesh.diameter(k) * mesh.diameter(k);
  std::vector<std::tuple<long long, int>> keyed;
  keyed.reserve(collected.size());
  for (int e : collected) {
    const double d2 = (mesh.barycenter(e) - xk).squaredNorm();
    keyed.emplace_back(e == k ? -1LL : std::llround(d2 / unit), e);
  }
  std::sort(keyed.begin(), keyed.end());

  ElementPatch patch;
  patch.owner = k;
  patch.threshold = threshold;
  for (int i = 0; i < threshold; ++i) {
    const int e = std::get<1>(keyed[static_cast<std::size_t>(i)]);
    patch.elements.push_back(e);
    patch.points.push_back(mesh.barycenter(e));
  }
  return patch;
}

ReconOp build_recon_op(const Mesh& mesh, int m, int threshold) {
  const int dim = irrot_dim(m);
  if (m < 1) throw std::invalid_argument("build_recon_op: m must be >= 1");
  if (threshold < dim) {
    throw std::invalid_argument("build_recon_op: patch size " + std::to_string(threshold) +
                                " below dim S^m = " + std::to_string(dim));
  }
  ReconOp op;
  op.mesh_ = &mesh;
  op.m_ = m;
  op.threshold_ = threshold;
  const int ne = mesh.num_elements();
  op.patches_.reserve(static_cast<std::size_t>(ne));
  op.matrices_.reserve(static_cast<std::size_t>(ne));
  op.condition_.reserve(static_cast<std::size_t>(ne));
  auto bases = std::make_shared<std::vector<IrrotBasis>>();
  bases->reserve(static_cast<std::size_t>(ne));

  const int free = dim - 2;
  for (int k = 0; k < ne; ++k) {
    ElementPatch patch = build_patch(mesh, k, threshold);
    const int np = static_cast<int>(patch.elements.size());
    double diam = 0.0;
    for (int i = 0; i < np; ++i) {
      for (int j = i + 1; j < np; ++j) {
        diam = std::max(diam, (patch.points[static_cast<std::size_t>(i)] -
                               patch.points[static_cast<std::size_t>(j)]).norm());
      }
    }
    if (diam == 0.0) diam = mesh.diameter(k);
    IrrotBasis basis(m, mesh.barycenter(k), diam);

    // The constraint p(x_K) = g(x_K) fixes the two constant members; the
    // remaining coefficients fit the differences g(x_j) - g(x_K).
    Eigen::MatrixXd A(2 * (np - 1), free);
    for (int j = 1; j < np; ++j) {
      const ValueMatrix v = basis.eval(patch.points[static_cast<std::size_t>(j)]);
      for (int l = 0; l < free; ++l) {
        A(2 * (j - 1), l) = v(l + 2, 0);
        A(2 * (j - 1) + 1, l) = v(l + 2, 1);
      }
    }
    Eigen::MatrixXd mt = Eigen::MatrixXd::Zero(dim, 2 * np);
    mt(0, 0) = 1.0;
    mt(1, 1) = 1.0;
    double cond = 1.0;
    if (free > 0) {
      Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
      qr.setThreshold(1e-10);
      if (qr.rank() < free) {
        throw std::runtime_error("reconstruction: local least-squares problem on element " +
                                 std::to_string(k) + " is rank deficient (rank " +
                                 std::to_string(qr.rank()) + " < " + std::to_string(free) +
                                 "); enlarge the patch");
      }
      const auto diag = qr.matrixR().diagonal().cwiseAbs();
      cond = diag.maxCoeff() / diag.minCoeff();
      const Eigen::MatrixXd M =
          qr.solve(Eigen::MatrixXd::Identity(2 * (np - 1), 2 * (np - 1)));
      for (int l = 0; l < free; ++l) {
        for (int j = 1; j < np; ++j) {
          for (int c = 0; c < 2; ++c) {
            const double v = M(l, 2 * (j - 1) + c);
            mt(l + 2, 2 * j + c) = v;
            mt(l + 2, c) -= v;
          }
        }
      }
    }
    op.patches_.push_back(std::move(patch));
    bases->push_back(basis);
    op.matrices_.push_back(std::move(mt));
    op.condition_.push_back(cond);
  }
  op.bases_ = std::move(bases);
  return op;
}

PiecewiseField ReconOp::apply(const Eigen::VectorXd& dofs) const {
  if (dofs.size() != 2 * num_elements()) {
    throw std::invalid_argument("apply_recon: expected " + std::to_string(2 * num_elements()) +
                                " dofs, got " + std::to_string(dofs.size()));
  }
  std::vector<Eigen::VectorXd> coeffs;
  coeffs.reserve(patches_.size());
  for (std::size_t k = 0; k < patches_.size(); ++k) {
    const auto& els = patches_[k].elements;
    Eigen::VectorXd local(2 * static_cast<Eigen::Index>(els.size()));
    for (std::size_t j = 0; j < els.size(); ++j) {
      local(2 * static_cast<Eigen::Index>(j)) = dofs(2 * els[j]);
      local(2 * static_cast<Eigen::Index>(j) + 1) = dofs(2 * els[j] + 1);
    }
    coeffs.push_back(matrices_[k] * local);
  }
  return PiecewiseField(bases_, std::move(coeffs));
}

void ReconOp::dump(std::ostream& out) const {
  out << "element,patch_size,condition\n";
  for (int k = 0; k < num_elements(); ++k) {
    out << k << ',' << patch(k).elements.size() << ',' << condition(k) << '\n';
  }
}

TrialSpace TrialSpace::reconstructed(const ReconOp& op) {
  TrialSpace s;
  s.kind_ = SpaceKind::reconstructed;
  s.m_ = op.degree();
  s.mesh_ = &op.mesh();
  s.num_dofs_ = 2 * op.num_elements();
  s.bases_ = op.bases();
  s.locals_.reserve(static_cast<std::size_t>(op.num_elements()));
  for (int k = 0; k < op.num_elements(); ++k) {
    LocalExpansion loc;
    for (int e : op.patch(k).elements) {
      loc.dofs.push_back(2 * e);
      loc.dofs.push_back(2 * e + 1);
    }
    loc.coeffs = op.matrix(k);
    s.locals_.push_back(std::move(loc));
  }
  return s;
}

TrialSpace TrialSpace::plain(const Mesh& mesh, int m) {
  TrialSpace s;
  s.kind_ = SpaceKind::plain;
  s.m_ = m;
  s.mesh_ = &mesh;
  const int dim = irrot_dim(m);
  s.num_dofs_ = dim * mesh.num_elements();
  auto bases = std::make_shared<std::vector<IrrotBasis>>();
  for (int k = 0; k < mesh.num_elements(); ++k) {
    bases->emplace_back(m, mesh.barycenter(k), mesh.diameter(k));
    LocalExpansion loc;
    for (int l = 0; l < dim; ++l) loc.dofs.push_back(dim * k + l);
    loc.coeffs = Eigen::MatrixXd::Identity(dim, dim);
    s.locals_.push_back(std::move(loc));
  }
  s.bases_ = std::move(bases);
  return s;
}

PiecewiseField TrialSpace::field(const Eigen::VectorXd& dofs) const {
  if (dofs.size() != num_dofs_) {
    throw std::invalid_argument("trial space: expected " + std::to_string(num_dofs_) +
                                " dofs, got " + std::to_string(dofs.size()));
  }
  std::vector<Eigen::VectorXd> coeffs;
  coeffs.reserve(locals_.size());
  for (const auto& loc : locals_) {
    Eigen::VectorXd local(static_cast<Eigen::Index>(loc.dofs.size()));
    for (std::size_t i = 0; i < loc.dofs.size(); ++i) local(static_cast<Eigen::Index>(i)) = dofs(loc.dofs[i]);
    coeffs.push_back(loc.coeffs * local);
  }
  return PiecewiseField(bases_, std::move(coeffs));
}

Eigen::VectorXd TrialSpace::interpolate(const VectorFn& g) const {
  return interpolate(ElementVectorFn([&g](int, const Point& x) { return g(x); }));
}

Eigen::VectorXd TrialSpace::interpolate(const ElementVectorFn& g) const {
  Eigen::VectorXd dofs(num_dofs_);
  const Mesh& mesh = *mesh_;
  if (kind_ == SpaceKind::reconstructed) {
    for (int k = 0; k < mesh.num_elements(); ++k) {
      const Eigen::Vector2d v = g(k, mesh.barycenter(k));
      dofs(2 * k) = v.x();
      dofs(2 * k + 1) = v.y();
    }
    return dofs;
  }
  const int dim = irrot_dim(m_);
  const QuadRule& rule = quadrature(QuadKind::triangle, std::min(kMaxQuadDegree, 2 * m_ + 4));
  for (int k = 0; k < mesh.num_elements(); ++k) {
    const MappedRule q = map_triangle(rule, mesh.element_vertices(k));
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(dim, dim);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim);
    for (std::size_t i = 0; i < q.points.size(); ++i) {
      const ValueMatrix v = basis(k).eval(q.points[i]);
      gram.noalias() += q.weights[i] * v * v.transpose();
      rhs.noalias() += q.weights[i] * v * g(k, q.points[i]);
    }
    dofs.segment(dim * k, dim) = gram.ldlt().solve(rhs);
  }
  return dofs;
}

}  // namespace malsfem
