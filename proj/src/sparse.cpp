#include "pctl/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <sstream>

namespace pctl {

double dot(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DimensionError("dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

void axpy(double a, std::span<const double> x, std::span<double> y) {
  if (x.size() != y.size()) throw DimensionError("axpy: length mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

// ---------------------------------------------------------------------------
// SparseSym

SparseSym SparseSym::from_triplets(std::size_t n, std::span<const Triplet> entries, double sym_tol) {
  std::vector<Triplet> sorted(entries.begin(), entries.end());
  for (const auto& t : sorted) {
    if (t.row >= n || t.col >= n) {
      std::ostringstream os;
      os << "entry (" << t.row + 1 << "," << t.col + 1 << ") outside " << n << "x" << n;
      throw DimensionError(os.str());
    }
  }
  std::sort(sorted.begin(), sorted.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });

  SparseSym m;
  m.n_ = n;
  m.row_ptr_.assign(n + 1, 0);
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    if (k > 0 && sorted[k].row == sorted[k - 1].row && sorted[k].col == sorted[k - 1].col) {
      m.values_.back() += sorted[k].value;
      continue;
    }
    m.col_idx_.push_back(sorted[k].col);
    m.values_.push_back(sorted[k].value);
    ++m.row_ptr_[sorted[k].row + 1];
  }
  std::partial_sum(m.row_ptr_.begin(), m.row_ptr_.end(), m.row_ptr_.begin());

  for (std::size_t i = 0; i < n; ++i) {
    if (!m.has(i, i)) {
      throw InvalidInstanceError("missing diagonal entry in row " + std::to_string(i + 1));
    }
    auto cols = m.row_cols(i);
    auto vals = m.row_vals(i);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      const std::size_t j = cols[k];
      if (!m.has(j, i)) {
        throw InvalidInstanceError("pattern not symmetric at (" + std::to_string(i + 1) + "," +
                                   std::to_string(j + 1) + ")");
      }
      const double a = vals[k];
      const double b = m.at(j, i);
      if (std::abs(a - b) > sym_tol * std::max(std::abs(a), std::abs(b))) {
        throw InvalidInstanceError("values not symmetric at (" + std::to_string(i + 1) + "," +
                                   std::to_string(j + 1) + ")");
      }
    }
  }
  return m;
}

SparseSym SparseSym::from_lower(std::size_t n, std::span<const Triplet> lower) {
  std::vector<Triplet> full;
  full.reserve(2 * lower.size());
  for (const auto& t : lower) {
    if (t.col > t.row) throw InvalidInstanceError("from_lower: entry above the diagonal");
    full.push_back(t);
    if (t.row != t.col) full.push_back({t.col, t.row, t.value});
  }
  return from_triplets(n, full, 0.0);
}

SparseSym SparseSym::identity(std::size_t n) { return diagonal(Vector(n, 1.0)); }

SparseSym SparseSym::diagonal(std::span<const double> diag) {
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < diag.size(); ++i) t.push_back({i, i, diag[i]});
  return from_triplets(diag.size(), t);
}

double SparseSym::at(std::size_t i, std::size_t j) const {
  auto cols = row_cols(i);
  auto it = std::lower_bound(cols.begin(), cols.end(), j);
  if (it == cols.end() || *it != j) return 0.0;
  return row_vals(i)[static_cast<std::size_t>(it - cols.begin())];
}

bool SparseSym::has(std::size_t i, std::size_t j) const {
  auto cols = row_cols(i);
  return std::binary_search(cols.begin(), cols.end(), j);
}

Vector SparseSym::diag() const {
  Vector d(n_);
  for (std::size_t i = 0; i < n_; ++i) d[i] = at(i, i);
  return d;
}

Vector SparseSym::row_sums() const {
  Vector s(n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i)
    for (double v : row_vals(i)) s[i] += v;
  return s;
}

std::vector<Triplet> SparseSym::lower_triplets() const {
  std::vector<Triplet> out;
  for (std::size_t i = 0; i < n_; ++i) {
    auto cols = row_cols(i);
    auto vals = row_vals(i);
    for (std::size_t k = 0; k < cols.size() && cols[k] <= i; ++k) out.push_back({i, cols[k], vals[k]});
  }
  return out;
}

void spmv(const SparseSym& m, std::span<const double> x, std::span<double> y) {
  if (x.size() != m.size() || y.size() != m.size()) {
    throw DimensionError("spmv: expected length " + std::to_string(m.size()) + ", got " +
                         std::to_string(x.size()));
  }
  const auto rp = m.row_ptr();
  const auto ci = m.col_idx();
  const auto va = m.values();
  for (std::size_t i = 0; i < m.size(); ++i) {
    double s = 0.0;
    for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) s += va[k] * x[ci[k]];
    y[i] = s;
  }
}

Vector spmv(const SparseSym& m, std::span<const double> x) {
  Vector y(m.size());
  spmv(m, x, y);
  return y;
}

double a_norm(const SparseSym& m, std::span<const double> x) {
  const double q = dot(x, spmv(m, x));
  if (q < 0.0) throw NotSpdError("a_norm: negative quadratic form (matrix not SPD)", 0);
  return std::sqrt(q);
}

// ---------------------------------------------------------------------------
// Ordering and Cholesky

std::vector<std::size_t> rcm_ordering(const SparseSym& m) {
  const std::size_t n = m.size();
  std::vector<std::size_t> degree(n);
  for (std::size_t i = 0; i < n; ++i) degree[i] = m.row_cols(i).size() - 1;

  std::vector<std::size_t> order;
  order.reserve(n);
  std::vector<char> seen(n, 0);
  std::vector<std::size_t> by_degree(n);
  std::iota(by_degree.begin(), by_degree.end(), 0);
  std::stable_sort(by_degree.begin(), by_degree.end(),
                   [&](std::size_t a, std::size_t b) { return degree[a] < degree[b]; });

  for (std::size_t start : by_degree) {
    if (seen[start]) continue;
    const std::size_t begin = order.size();
    std::queue<std::size_t> q;
    q.push(start);
    seen[start] = 1;
    std::vector<std::size_t> nbrs;
    while (!q.empty()) {
      const std::size_t v = q.front();
      q.pop();
      order.push_back(v);
      nbrs.clear();
      for (std::size_t j : m.row_cols(v))
        if (!seen[j]) nbrs.push_back(j);
      std::stable_sort(nbrs.begin(), nbrs.end(),
                       [&](std::size_t a, std::size_t b) { return degree[a] < degree[b]; });
      for (std::size_t j : nbrs) {
        seen[j] = 1;
        q.push(j);
      }
    }
    std::reverse(order.begin() + static_cast<std::ptrdiff_t>(begin), order.end());
  }
  return order;
}

CholFactor chol_factor(const SparseSym& m, Ordering ordering) {
  const std::size_t n = m.size();
  CholFactor f;
  if (ordering == Ordering::ReverseCuthillMcKee) {
    f.perm_ = rcm_ordering(m);
  } else {
    f.perm_.resize(n);
    std::iota(f.perm_.begin(), f.perm_.end(), 0);
  }
  std::vector<std::size_t> inv(n);
  for (std::size_t k = 0; k < n; ++k) inv[f.perm_[k]] = k;

  f.first_.assign(n, 0);
  f.offset_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t first = i;
    for (std::size_t c : m.row_cols(f.perm_[i])) first = std::min(first, inv[c]);
    f.first_[i] = first;
    f.offset_[i + 1] = f.offset_[i] + (i - first + 1);
  }
  f.values_.assign(f.offset_[n], 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t p = f.perm_[i];
    auto cols = m.row_cols(p);
    auto vals = m.row_vals(p);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      const std::size_t j = inv[cols[k]];
      if (j <= i) f.values_[f.offset_[i] + (j - f.first_[i])] = vals[k];
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    double* li = f.values_.data() + f.offset_[i] - f.first_[i];  // li[j] == L(i,j)
    for (std::size_t j = f.first_[i]; j < i; ++j) {
      const double* lj = f.values_.data() + f.offset_[j] - f.first_[j];
      double s = li[j];
      for (std::size_t k = std::max(f.first_[i], f.first_[j]); k < j; ++k) s -= li[k] * lj[k];
      li[j] = s / lj[j];
    }
    double d = li[i];
    for (std::size_t k = f.first_[i]; k < i; ++k) d -= li[k] * li[k];
    if (!(d > 0.0)) {
      const std::size_t idx = f.perm_[i] + 1;
      throw NotSpdError("matrix not SPD: non-positive pivot at index " + std::to_string(idx), idx);
    }
    li[i] = std::sqrt(d);
  }
  return f;
}

double CholFactor::lower(std::size_t i, std::size_t j) const {
  if (j > i || j < first_[i]) return 0.0;
  return values_[offset_[i] + (j - first_[i])];
}

void CholFactor::solve_in_place(std::span<double> x) const {
  const std::size_t n = size();
  if (x.size() != n) throw DimensionError("chol solve: length mismatch");
  Vector y(n);
  for (std::size_t k = 0; k < n; ++k) y[k] = x[perm_[k]];
  for (std::size_t i = 0; i < n; ++i) {
    const double* li = values_.data() + offset_[i] - first_[i];
    double s = y[i];
    for (std::size_t k = first_[i]; k < i; ++k) s -= li[k] * y[k];
    y[i] = s / li[i];
  }
  for (std::size_t i = n; i-- > 0;) {
    const double* li = values_.data() + offset_[i] - first_[i];
    y[i] /= li[i];
    const double yi = y[i];
    for (std::size_t k = first_[i]; k < i; ++k) y[k] -= li[k] * yi;
  }
  for (std::size_t k = 0; k < n; ++k) x[perm_[k]] = y[k];
}

Vector CholFactor::solve(std::span<const double> b) const {
  Vector x(b.begin(), b.end());
  solve_in_place(x);
  return x;
}

// ---------------------------------------------------------------------------
// Conjugate gradients

SolveResult cg_solve(const SparseSym& m, std::span<const double> b, double tol, std::size_t maxit,
                     const Preconditioner& precond, std::optional<std::span<const double>> x0) {
  const std::size_t n = m.size();
  if (b.size() != n) throw DimensionError("cg_solve: rhs length mismatch");
  if (!(tol > 0.0)) throw Error("cg_solve: tolerance must be positive");

  SolveResult out;
  out.x = x0 ? Vector(x0->begin(), x0->end()) : Vector(n, 0.0);
  if (out.x.size() != n) throw DimensionError("cg_solve: initial guess length mismatch");

  const double bnorm = norm2(b);
  Vector r(b.begin(), b.end());
  if (x0) axpy(-1.0, spmv(m, out.x), r);
  if (bnorm == 0.0) {
    std::fill(out.x.begin(), out.x.end(), 0.0);
    out.stats.residuals = {0.0};
    out.stats.converged = true;
    return out;
  }
  auto& stats = out.stats;
  stats.residuals.push_back(norm2(r) / bnorm);
  if (stats.residuals.back() <= tol) {
    stats.converged = true;
    return out;
  }

  Vector z = precond ? precond(r) : r;
  Vector p = z;
  Vector ap(n);
  double rz = dot(r, z);
  if (!(rz > 0.0)) throw NotSpdError("cg_solve: preconditioner not positive definite (r'z <= 0)", 0);

  while (stats.iters < maxit) {
    spmv(m, p, ap);
    const double pap = dot(p, ap);
    if (!(pap > 0.0)) throw NotSpdError("cg_solve: breakdown, p'Ap <= 0 (matrix not SPD)", 0);
    const double alpha = rz / pap;
    axpy(alpha, p, out.x);
    axpy(-alpha, ap, r);
    ++stats.iters;
    stats.residuals.push_back(norm2(r) / bnorm);
    if (stats.residuals.back() <= tol) {
      stats.converged = true;
      break;
    }
    z = precond ? precond(r) : r;
    const double rz_new = dot(r, z);
    if (!(rz_new > 0.0)) throw NotSpdError("cg_solve: preconditioner not positive definite (r'z <= 0)", 0);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  if (stats.iters > 0 && stats.residuals.front() > 0.0) {
    stats.rho_observed = std::pow(stats.residuals.back() / stats.residuals.front(),
                                  1.0 / static_cast<double>(stats.iters));
  }
  return out;
}

}  // namespace pctl
