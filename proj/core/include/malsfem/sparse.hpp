#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

namespace malsfem {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

/// Fixed sparsity pattern built from the dof groups that couple in a form
/// (elements, faces). Local matrices are added in place, so assembly does not
/// go through triplet lists.
class SparsePattern {
 public:
  SparsePattern() = default;
  SparsePattern(int n, const std::vector<std::vector<int>>& groups);

  int size() const { return static_cast<int>(matrix_.rows()); }
  /// Zero-valued matrix with the full pattern.
  const SparseMatrix& zero() const { return matrix_; }

  /// Adds local(i, j) at (dofs[i], dofs[j]). Every pair must lie in the pattern.
  static void add(SparseMatrix& target, const std::vector<int>& dofs, const Eigen::MatrixXd& local);

 private:
  SparseMatrix matrix_;
};

/// Solver for the symmetric positive definite systems of both stages:
/// sparse LDL^T with a cached symbolic analysis, conjugate gradients as the
/// fallback when the factorization breaks down.
class SpdSolver {
 public:
  explicit SpdSolver(double cg_tolerance = 1e-12) : cg_tolerance_(cg_tolerance) {}

  /// Returns std::nullopt and fills `error` when neither route succeeds.
  std::optional<Eigen::VectorXd> solve(const SparseMatrix& a, const Eigen::VectorXd& b,
                                       std::string* error = nullptr);

  /// Smallest/largest pivot ratio of the last successful factorization
  /// (negative when the last solve went through CG).
  double pivot_ratio() const { return pivot_ratio_; }
  bool used_fallback() const { return used_fallback_; }

 private:
  Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower> ldlt_;
  bool analyzed_ = false;
  Eigen::Index analyzed_nnz_ = -1;
  double cg_tolerance_;
  double pivot_ratio_ = -1.0;
  bool used_fallback_ = false;
};

}  // namespace malsfem
