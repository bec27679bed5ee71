#include "malsfem/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/IterativeLinearSolvers>

namespace malsfem {

SparsePattern::SparsePattern(int n, const std::vector<std::vector<int>>& groups) {
  std::vector<std::vector<int>> cols(static_cast<std::size_t>(n));
  for (const auto& g : groups) {
    for (int j : g) {
      auto& c = cols[static_cast<std::size_t>(j)];
      c.insert(c.end(), g.begin(), g.end());
    }
    // keep the temporary lists short on large meshes
    for (int j : g) {
      auto& c = cols[static_cast<std::size_t>(j)];
      if (c.size() > 4096) {
        std::sort(c.begin(), c.end());
        c.erase(std::unique(c.begin(), c.end()), c.end());
      }
    }
  }
  std::vector<int> outer(static_cast<std::size_t>(n) + 1, 0);
  for (int j = 0; j < n; ++j) {
    auto& c = cols[static_cast<std::size_t>(j)];
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    outer[static_cast<std::size_t>(j) + 1] = outer[static_cast<std::size_t>(j)] + static_cast<int>(c.size());
  }
  matrix_.resize(n, n);
  matrix_.resizeNonZeros(outer.back());
  std::copy(outer.begin(), outer.end(), matrix_.outerIndexPtr());
  int* inner = matrix_.innerIndexPtr();
  for (int j = 0; j < n; ++j) {
    const auto& c = cols[static_cast<std::size_t>(j)];
    std::copy(c.begin(), c.end(), inner + outer[static_cast<std::size_t>(j)]);
  }
  std::fill(matrix_.valuePtr(), matrix_.valuePtr() + outer.back(), 0.0);
}

void SparsePattern::add(SparseMatrix& target, const std::vector<int>& dofs, const Eigen::MatrixXd& local) {
  const int* outer = target.outerIndexPtr();
  const int* inner = target.innerIndexPtr();
  double* values = target.valuePtr();
  for (std::size_t jl = 0; jl < dofs.size(); ++jl) {
    const int j = dofs[jl];
    const int* begin = inner + outer[j];
    const int* end = inner + outer[j + 1];
    for (std::size_t il = 0; il < dofs.size(); ++il) {
      const int* pos = std::lower_bound(begin, end, dofs[il]);
      if (pos == end || *pos != dofs[il]) {
        throw std::logic_error("sparse assembly: entry outside the pattern");
      }
      values[pos - inner] += local(static_cast<Eigen::Index>(il), static_cast<Eigen::Index>(jl));
    }
  }
}

std::optional<Eigen::VectorXd> SpdSolver::solve(const SparseMatrix& a, const Eigen::VectorXd& b,
                                                std::string* error) {
  used_fallback_ = false;
  if (!analyzed_ || analyzed_nnz_ != a.nonZeros()) {
    ldlt_.analyzePattern(a);
    analyzed_ = true;
    analyzed_nnz_ = a.nonZeros();
  }
  ldlt_.factorize(a);
  if (ldlt_.info() == Eigen::Success) {
    const auto d = ldlt_.vectorD();
    const double dmax = d.cwiseAbs().maxCoeff();
    const double dmin = d.minCoeff();
    pivot_ratio_ = dmax > 0.0 ? dmin / dmax : -1.0;
    if (dmin > 1e-14 * dmax) {
      Eigen::VectorXd x = ldlt_.solve(b);
      if (x.allFinite()) return x;
    }
  }
  used_fallback_ = true;
  pivot_ratio_ = -1.0;
  Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper> cg;
  cg.setTolerance(cg_tolerance_);
  cg.setMaxIterations(std::max<Eigen::Index>(1000, 10 * a.rows()));
  cg.compute(a);
  Eigen::VectorXd x = cg.solve(b);
  if (cg.info() == Eigen::Success && x.allFinite()) return x;
  if (error) {
    *error = "sparse LDL^T found a non-positive pivot and CG stopped at relative residual " +
             std::to_string(cg.error());
  }
  return std::nullopt;
}

}  // namespace malsfem
