#pragma once

#include <functional>
#include <optional>

#include "pctl/common.hpp"

namespace pctl {

struct Triplet {
  std::size_t row;
  std::size_t col;
  double value;
};

/// Symmetric sparse matrix in CSR form with the full pattern stored.
///
/// Construction enforces structural symmetry, value symmetry to a relative
/// tolerance, and a stored diagonal entry in every row. Column indices are
/// sorted within each row; duplicate triplets are summed.
class SparseSym {
 public:
  SparseSym() = default;

  /// Build from triplets covering the full (upper and lower) pattern.
  static SparseSym from_triplets(std::size_t n, std::span<const Triplet> entries,
                                 double sym_tol = defaults::kSymmetryRelTol);
  /// Build from lower-triangle triplets (row >= col); the upper half is mirrored.
  static SparseSym from_lower(std::size_t n, std::span<const Triplet> lower);
  static SparseSym identity(std::size_t n);
  static SparseSym diagonal(std::span<const double> diag);

  std::size_t size() const { return n_; }
  std::size_t nonzeros() const { return values_.size(); }

  std::span<const std::size_t> row_ptr() const { return row_ptr_; }
  std::span<const std::size_t> col_idx() const { return col_idx_; }
  std::span<const double> values() const { return values_; }

  std::span<const std::size_t> row_cols(std::size_t i) const {
    return std::span<const std::size_t>(col_idx_).subspan(row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]);
  }
  std::span<const double> row_vals(std::size_t i) const {
    return std::span<const double>(values_).subspan(row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]);
  }

  /// Stored value at (i, j), 0 if not in the pattern.
  double at(std::size_t i, std::size_t j) const;
  bool has(std::size_t i, std::size_t j) const;
  Vector diag() const;
  Vector row_sums() const;
  std::vector<Triplet> lower_triplets() const;

  friend bool operator==(const SparseSym&, const SparseSym&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::size_t> col_idx_;
  Vector values_;
};

Vector spmv(const SparseSym& m, std::span<const double> x);
void spmv(const SparseSym& m, std::span<const double> x, std::span<double> y);

/// sqrt(x' m x). Throws NotSpdError when the quadratic form is negative.
double a_norm(const SparseSym& m, std::span<const double> x);

enum class Ordering { Natural, ReverseCuthillMcKee };

/// Reverse Cuthill-McKee permutation; perm[new] = old. Each connected
/// component is numbered and reversed on its own, so a diagonal matrix keeps
/// the identity ordering.
std::vector<std::size_t> rcm_ordering(const SparseSym& m);

/// Envelope (profile) Cholesky factor L L' = P A P'.
class CholFactor {
 public:
  std::size_t size() const { return perm_.size(); }
  /// perm()[k] is the original index of the k-th factored row.
  std::span<const std::size_t> perm() const { return perm_; }

  /// Entry of L in the permuted ordering (0 outside the envelope).
  double lower(std::size_t i, std::size_t j) const;
  std::size_t stored() const { return values_.size(); }

  Vector solve(std::span<const double> b) const;
  void solve_in_place(std::span<double> x) const;

 private:
  friend CholFactor chol_factor(const SparseSym&, Ordering);
  std::vector<std::size_t> perm_;
  std::vector<std::size_t> first_;   // first stored column of each row
  std::vector<std::size_t> offset_;  // start of each row in values_
  Vector values_;
};

/// Throws NotSpdError naming the 1-based original index of the failed pivot.
CholFactor chol_factor(const SparseSym& m, Ordering ordering = Ordering::ReverseCuthillMcKee);

/// Per-solve convergence record shared by every iterative driver.
struct SolveStats {
  Vector residuals;  // relative 2-norm residual, entry 0 is the initial one
  std::size_t iters = 0;
  double rho_observed = 0.0;
  bool converged = false;
};

struct SolveResult {
  Vector x;
  SolveStats stats;
};

/// z = B r for an SPD preconditioner B.
using Preconditioner = std::function<Vector(std::span<const double>)>;

/// Preconditioned conjugate gradients with zero initial guess unless `x0` is
/// given. Stops at ||b - m x||_2 / ||b||_2 <= tol. Throws NotSpdError on
/// breakdown (p'Ap <= 0 or r'z <= 0).
SolveResult cg_solve(const SparseSym& m, std::span<const double> b, double tol, std::size_t maxit,
                     const Preconditioner& precond = nullptr,
                     std::optional<std::span<const double>> x0 = std::nullopt);

}  // namespace pctl
