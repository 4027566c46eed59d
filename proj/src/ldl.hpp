#pragma once

#include <vector>

#include <Eigen/Core>

namespace gcs::internal {

/// Sparse LDL' factorization of a symmetric quasi-definite matrix with a
/// fixed sparsity pattern. Pivots whose sign disagrees with the expected
/// inertia (or that are too small) are replaced by a regularization value,
/// so the factorization never breaks down.
class QuasiDefiniteLdl {
 public:
  /// `rows`/`cols` list the lower-triangle entries (row >= col), without
  /// duplicates, and must include every diagonal entry. `signs[i]` is +1 or
  /// -1, the expected sign of pivot i.
  QuasiDefiniteLdl(int dim, const std::vector<int>& rows, const std::vector<int>& cols,
                   std::vector<int> signs);

  /// Factors the matrix whose entries, in the order given to the
  /// constructor, are `values`. Returns the number of regularized pivots.
  int Factor(const std::vector<double>& values, double static_reg, double dynamic_eps,
             double dynamic_reg);

  /// Overwrites `x` (right-hand side on entry) with the solution.
  void Solve(Eigen::Ref<Eigen::VectorXd> x) const;

  int dim() const { return n_; }

 private:
  int n_;
  std::vector<int> perm_;      // perm_[new] = old
  std::vector<int> iperm_;     // iperm_[old] = new
  std::vector<int> signs_;     // in permuted order
  // Permuted upper triangle in CSC form.
  std::vector<int> ap_, ai_;
  std::vector<int> slot_;      // entry k -> position in ax_
  std::vector<int> diag_slot_;
  std::vector<double> ax_;
  // Elimination tree and factor storage.
  std::vector<int> etree_, lnz_, lp_, li_;
  std::vector<double> lx_, d_, dinv_;
};

}  // namespace gcs::internal
