#pragma once

#include <Eigen/Dense>

#include "pctl/common.hpp"
#include "pctl/sparse.hpp"

namespace pctl {

using DenseMatrix = Eigen::MatrixXd;

/// Dense symmetric matrix for desk-scale verification. The dimension cap
/// keeps the O(n^3) kernels from being pointed at production-size systems.
class DenseSym {
 public:
  explicit DenseSym(DenseMatrix values, std::size_t cap = defaults::kDenseCap,
                    double sym_tol = defaults::kSymmetryRelTol);

  std::size_t size() const { return static_cast<std::size_t>(values_.rows()); }
  const DenseMatrix& values() const { return values_; }

 private:
  DenseMatrix values_;
};

/// Eigenvalues in ascending order.
Vector dense_sym_eig(const DenseSym& m);

/// Throws DimensionError if n exceeds the cap.
void check_dense_cap(std::size_t n, std::size_t cap, const char* what);

DenseMatrix to_dense(const SparseSym& m, std::size_t cap = defaults::kDenseCap);

/// Symmetrize (m + m') / 2 before an eigen solve; removes roundoff asymmetry
/// of products like M' D^-1 M.
DenseMatrix symmetric_part(const DenseMatrix& m);

/// Smallest eigenvalue of a matrix known to be symmetric up to roundoff.
double lambda_min(const DenseMatrix& m);
/// Largest eigenvalue of the pencil (a, b) with b SPD.
double generalized_lambda_max(const DenseMatrix& a, const DenseMatrix& b);

}  // namespace pctl
