#include "pctl/dense.hpp"

#include <algorithm>
#include <cmath>

namespace pctl {

void check_dense_cap(std::size_t n, std::size_t cap, const char* what) {
  if (n > cap) {
    throw DimensionError(std::string(what) + ": dimension " + std::to_string(n) +
                         " exceeds dense cap " + std::to_string(cap));
  }
}

DenseSym::DenseSym(DenseMatrix values, std::size_t cap, double sym_tol) : values_(std::move(values)) {
  if (values_.rows() != values_.cols()) throw DimensionError("DenseSym: matrix not square");
  check_dense_cap(size(), cap, "DenseSym");
  const double scale = values_.cwiseAbs().maxCoeff();
  if ((values_ - values_.transpose()).cwiseAbs().maxCoeff() > sym_tol * std::max(scale, 1e-300)) {
    throw InvalidInstanceError("DenseSym: matrix not symmetric");
  }
}

Vector dense_sym_eig(const DenseSym& m) {
  if (m.size() == 0) return {};
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(m.values(), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw Error("dense_sym_eig: eigen solver failed");
  Vector ev(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  std::sort(ev.begin(), ev.end());
  return ev;
}

DenseMatrix to_dense(const SparseSym& m, std::size_t cap) {
  check_dense_cap(m.size(), cap, "to_dense");
  const auto n = static_cast<Eigen::Index>(m.size());
  DenseMatrix d = DenseMatrix::Zero(n, n);
  for (std::size_t i = 0; i < m.size(); ++i) {
    auto cols = m.row_cols(i);
    auto vals = m.row_vals(i);
    for (std::size_t k = 0; k < cols.size(); ++k)
      d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(cols[k])) = vals[k];
  }
  return d;
}

DenseMatrix symmetric_part(const DenseMatrix& m) { return 0.5 * (m + m.transpose()); }

double lambda_min(const DenseMatrix& m) {
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(symmetric_part(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double generalized_lambda_max(const DenseMatrix& a, const DenseMatrix& b) {
  Eigen::LLT<DenseMatrix> llt(symmetric_part(b));
  if (llt.info() != Eigen::Success) throw NotSpdError("generalized_lambda_max: pencil matrix not SPD", 0);
  // L^-1 a L^-T
  const DenseMatrix l = llt.matrixL();
  DenseMatrix t = l.triangularView<Eigen::Lower>().solve(symmetric_part(a));
  t = l.triangularView<Eigen::Lower>().solve(t.transpose()).transpose();
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(symmetric_part(t), Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

}  // namespace pctl
