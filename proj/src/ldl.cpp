#include "ldl.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <Eigen/OrderingMethods>
#include <Eigen/SparseCore>

namespace gcs::internal {

QuasiDefiniteLdl::QuasiDefiniteLdl(int dim, const std::vector<int>& rows,
                                   const std::vector<int>& cols, std::vector<int> signs)
    : n_(dim) {
  if (rows.size() != cols.size() || static_cast<int>(signs.size()) != dim) {
    throw std::invalid_argument("QuasiDefiniteLdl: inconsistent pattern");
  }
  // Fill-reducing ordering on the symmetric pattern.
  {
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(2 * rows.size());
    for (size_t k = 0; k < rows.size(); ++k) {
      t.emplace_back(rows[k], cols[k], 1.0);
      if (rows[k] != cols[k]) t.emplace_back(cols[k], rows[k], 1.0);
    }
    Eigen::SparseMatrix<double> pattern(dim, dim);
    pattern.setFromTriplets(t.begin(), t.end());
    Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> p;
    Eigen::AMDOrdering<int> amd;
    amd(pattern, p);
    // Eigen returns the inverse permutation: indices()[new] = old.
    perm_.assign(p.indices().data(), p.indices().data() + dim);
    iperm_.assign(dim, 0);
    for (int i = 0; i < dim; ++i) iperm_[perm_[i]] = i;
  }
  signs_.resize(dim);
  for (int i = 0; i < dim; ++i) signs_[i] = signs[perm_[i]];

  // Upper triangle of the permuted matrix: entry (min, max) in column max.
  std::vector<int> count(dim + 1, 0);
  std::vector<std::pair<int, int>> pos(rows.size());
  for (size_t k = 0; k < rows.size(); ++k) {
    const int a = iperm_[rows[k]];
    const int b = iperm_[cols[k]];
    pos[k] = {std::min(a, b), std::max(a, b)};
    ++count[pos[k].second + 1];
  }
  ap_.assign(dim + 1, 0);
  for (int j = 0; j < dim; ++j) ap_[j + 1] = ap_[j] + count[j + 1];
  std::vector<int> next(ap_.begin(), ap_.end() - 1);
  ai_.assign(rows.size(), 0);
  slot_.assign(rows.size(), 0);
  for (size_t k = 0; k < rows.size(); ++k) {
    const int col = pos[k].second;
    slot_[k] = next[col]++;
    ai_[slot_[k]] = pos[k].first;
  }
  ax_.assign(rows.size(), 0.0);
  diag_slot_.assign(dim, -1);
  for (size_t k = 0; k < rows.size(); ++k) {
    if (rows[k] == cols[k]) diag_slot_[iperm_[rows[k]]] = slot_[k];
  }
  for (int i = 0; i < dim; ++i) {
    if (diag_slot_[i] < 0) throw std::invalid_argument("QuasiDefiniteLdl: missing diagonal");
  }

  // Elimination tree and column counts.
  etree_.assign(dim, -1);
  lnz_.assign(dim, 0);
  std::vector<int> work(dim, 0);
  for (int j = 0; j < dim; ++j) {
    work[j] = j;
    for (int p = ap_[j]; p < ap_[j + 1]; ++p) {
      int i = ai_[p];
      while (work[i] != j) {
        if (etree_[i] == -1) etree_[i] = j;
        ++lnz_[i];
        work[i] = j;
        i = etree_[i];
      }
    }
  }
  lp_.assign(dim + 1, 0);
  for (int i = 0; i < dim; ++i) lp_[i + 1] = lp_[i] + lnz_[i];
  li_.assign(lp_[dim], 0);
  lx_.assign(lp_[dim], 0.0);
  d_.assign(dim, 0.0);
  dinv_.assign(dim, 0.0);
}

int QuasiDefiniteLdl::Factor(const std::vector<double>& values, double static_reg,
                             double dynamic_eps, double dynamic_reg) {
  for (size_t k = 0; k < values.size(); ++k) ax_[slot_[k]] = values[k];
  for (int i = 0; i < n_; ++i) ax_[diag_slot_[i]] += signs_[i] * static_reg;

  std::vector<double> y(n_, 0.0);
  std::vector<char> used(n_, 0);
  std::vector<int> yidx(n_), buffer(n_);
  std::vector<int> next_space(lp_.begin(), lp_.end() - 1);
  int regularized = 0;

  for (int k = 0; k < n_; ++k) {
    int nnz_y = 0;
    d_[k] = 0.0;
    for (int p = ap_[k]; p < ap_[k + 1]; ++p) {
      const int b = ai_[p];
      if (b == k) {
        d_[k] = ax_[p];
        continue;
      }
      y[b] = ax_[p];
      if (used[b]) continue;
      used[b] = 1;
      buffer[0] = b;
      int n_elim = 1;
      int nxt = etree_[b];
      while (nxt != -1 && nxt < k) {
        if (used[nxt]) break;
        used[nxt] = 1;
        buffer[n_elim++] = nxt;
        nxt = etree_[nxt];
      }
      while (n_elim > 0) yidx[nnz_y++] = buffer[--n_elim];
    }
    for (int i = nnz_y - 1; i >= 0; --i) {
      const int c = yidx[i];
      const int tmp = next_space[c];
      const double yc = y[c];
      for (int j = lp_[c]; j < tmp; ++j) y[li_[j]] -= lx_[j] * yc;
      li_[tmp] = k;
      lx_[tmp] = yc * dinv_[c];
      d_[k] -= yc * lx_[tmp];
      ++next_space[c];
      y[c] = 0.0;
      used[c] = 0;
    }
    if (signs_[k] * d_[k] <= dynamic_eps || !std::isfinite(d_[k])) {
      d_[k] = signs_[k] * dynamic_reg;
      ++regularized;
    }
    dinv_[k] = 1.0 / d_[k];
  }
  return regularized;
}

void QuasiDefiniteLdl::Solve(Eigen::Ref<Eigen::VectorXd> x) const {
  Eigen::VectorXd w(n_);
  for (int i = 0; i < n_; ++i) w[i] = x[perm_[i]];
  for (int i = 0; i < n_; ++i) {
    const double wi = w[i];
    for (int j = lp_[i]; j < lp_[i + 1]; ++j) w[li_[j]] -= lx_[j] * wi;
  }
  for (int i = 0; i < n_; ++i) w[i] *= dinv_[i];
  for (int i = n_ - 1; i >= 0; --i) {
    double wi = w[i];
    for (int j = lp_[i]; j < lp_[i + 1]; ++j) wi -= lx_[j] * w[li_[j]];
    w[i] = wi;
  }
  for (int i = 0; i < n_; ++i) x[perm_[i]] = w[i];
}

}  // namespace gcs::internal
