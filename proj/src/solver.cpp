#include "pctl/solver.hpp"

#include <cmath>
#include <variant>

namespace pctl {

Interpolation build_interpolation(const ThreeTMatrix& m, const CholFactor& rad_factor, const CholFactor& ion_factor) {
  m.check_dimensions();
  if (rad_factor.size() != m.n || ion_factor.size() != m.n) {
    throw DimensionError("build_interpolation: factor size does not match the system");
  }
  auto weights = [](const Vector& d, const CholFactor& f) {
    Vector w(d.size());
    for (std::size_t k = 0; k < d.size(); ++k) w[k] = -d[k];
    f.solve_in_place(w);
    return w;
  };
  return {weights(m.rad_exchange, rad_factor), weights(m.ion_exchange, ion_factor)};
}

SparseSym build_coarse_operator(const ThreeTMatrix& m, const Interpolation& interp) {
  m.check_dimensions();
  if (interp.w_r.size() != m.n || interp.w_i.size() != m.n) {
    throw DimensionError("build_coarse_operator: interpolation size does not match the system");
  }
  std::vector<Triplet> t;
  t.reserve(m.radiation.nonzeros() + m.ion.nonzeros() + m.electron.nonzeros() + 2 * m.n);
  for (Species s : {Species::Radiation, Species::Ion}) {
    const auto& a = m.block(s);
    const auto& w = interp.weights(s);
    const auto& d = m.exchange(s);
    for (std::size_t k = 0; k < m.n; ++k) {
      auto cols = a.row_cols(k);
      auto vals = a.row_vals(k);
      for (std::size_t q = 0; q < cols.size(); ++q) t.push_back({k, cols[q], vals[q] * (w[k] * w[cols[q]])});
      t.push_back({k, k, 2.0 * d[k] * w[k]});
    }
  }
  for (std::size_t k = 0; k < m.n; ++k) {
    auto cols = m.electron.row_cols(k);
    auto vals = m.electron.row_vals(k);
    for (std::size_t q = 0; q < cols.size(); ++q) t.push_back({k, cols[q], vals[q]});
  }
  return SparseSym::from_triplets(m.n, t);
}

// ---------------------------------------------------------------------------
// Hierarchy

struct Hierarchy::LevelSolver {
  struct InnerCg {
    SparseSym matrix;
    Vector inv_diag;
    double tol;
  };
  std::variant<CholFactor, InnerCg> impl;

  Vector solve(std::span<const double> rhs) const {
    if (const auto* f = std::get_if<CholFactor>(&impl)) return f->solve(rhs);
    const auto& cg = std::get<InnerCg>(impl);
    const auto jacobi = [&cg](std::span<const double> r) {
      Vector z(r.size());
      for (std::size_t k = 0; k < r.size(); ++k) z[k] = cg.inv_diag[k] * r[k];
      return z;
    };
    auto res = cg_solve(cg.matrix, rhs, cg.tol, 10 * cg.matrix.size() + 100, jacobi);
    if (!res.stats.converged) throw Error("inner CG did not reach its tolerance");
    return std::move(res.x);
  }
};

Hierarchy::Hierarchy(ThreeTMatrix m, HierarchyOptions options) : matrix_(std::move(m)), options_(options) {
  matrix_.check_dimensions();
  full_ = assemble_full(matrix_);

  auto make = [&](const SparseSym& a, const char* name) {
    auto solver = std::make_shared<LevelSolver>();
    try {
      if (options_.sub_solve == SubSolve::Direct) {
        solver->impl = chol_factor(a, options_.ordering);
      } else {
        (void)chol_factor(a, options_.ordering);  // SPD certificate only
        Vector inv = a.diag();
        for (double& v : inv) v = 1.0 / v;
        solver->impl = LevelSolver::InnerCg{a, std::move(inv), options_.inner_tol};
      }
    } catch (const NotSpdError& e) {
      throw NotSpdError(std::string(name) + ": " + e.what(), e.index());
    }
    return solver;
  };

  // Interpolation always uses direct factors of A_r and A_i.
  const CholFactor fr = chol_factor(matrix_.radiation, options_.ordering);
  const CholFactor fi = chol_factor(matrix_.ion, options_.ordering);
  interp_ = build_interpolation(matrix_, fr, fi);
  coarse_ = build_coarse_operator(matrix_, interp_);

  solvers_[0] = make(matrix_.radiation, "A_r");
  solvers_[1] = make(matrix_.ion, "A_i");
  solvers_[2] = make(matrix_.electron, "A_e");
  solvers_[3] = make(coarse_, "coarse operator");
}

Vector Hierarchy::solve(Level level, std::span<const double> rhs) const {
  return solvers_[static_cast<std::size_t>(level)]->solve(rhs);
}

// ---------------------------------------------------------------------------
// Cycle components

namespace {

void check_lengths(const Hierarchy& h, std::span<const double> b, std::span<const double> x) {
  const std::size_t len = 3 * h.n();
  if (b.size() != len || x.size() != len) {
    throw DimensionError("expected full-length vectors of size " + std::to_string(len));
  }
}

void solve_electron(const Hierarchy& h, std::span<const double> b, std::span<double> x) {
  const std::size_t n = h.n();
  const auto& m = h.matrix();
  auto xr = part(x, n, Species::Radiation);
  auto xi = part(x, n, Species::Ion);
  auto be = part(b, n, Species::Electron);
  Vector rhs(n);
  for (std::size_t k = 0; k < n; ++k) rhs[k] = be[k] - m.rad_exchange[k] * xr[k] - m.ion_exchange[k] * xi[k];
  const Vector xe = h.solve(Hierarchy::Level::Electron, rhs);
  std::copy(xe.begin(), xe.end(), part(x, n, Species::Electron).begin());
}

void solve_fine(const Hierarchy& h, std::span<const double> b, std::span<double> x) {
  const std::size_t n = h.n();
  const auto& m = h.matrix();
  auto xe = part(std::span<const double>(x), n, Species::Electron);
  for (Species s : {Species::Radiation, Species::Ion}) {
    const auto& d = m.exchange(s);
    auto bs = part(b, n, s);
    Vector rhs(n);
    for (std::size_t k = 0; k < n; ++k) rhs[k] = bs[k] - d[k] * xe[k];
    const Vector xs = h.solve(s == Species::Radiation ? Hierarchy::Level::Radiation : Hierarchy::Level::Ion, rhs);
    std::copy(xs.begin(), xs.end(), part(x, n, s).begin());
  }
}

}  // namespace

void pre_smooth(const Hierarchy& h, std::span<const double> b, std::span<double> x) {
  check_lengths(h, b, x);
  solve_electron(h, b, x);
  solve_fine(h, b, x);
}

void post_smooth(const Hierarchy& h, std::span<const double> b, std::span<double> x) {
  check_lengths(h, b, x);
  solve_fine(h, b, x);
  solve_electron(h, b, x);
}

Vector restrict_residual(const Hierarchy& h, std::span<const double> r) {
  const std::size_t n = h.n();
  if (r.size() != 3 * n) throw DimensionError("restrict_residual: length mismatch");
  const auto& w = h.interpolation();
  auto rr = part(r, n, Species::Radiation);
  auto ri = part(r, n, Species::Ion);
  auto re = part(r, n, Species::Electron);
  Vector rc(n);
  for (std::size_t k = 0; k < n; ++k) rc[k] = w.w_r[k] * rr[k] + w.w_i[k] * ri[k] + re[k];
  return rc;
}

void coarse_correct(const Hierarchy& h, std::span<const double> b, std::span<double> x) {
  check_lengths(h, b, x);
  const std::size_t n = h.n();
  Vector r(b.begin(), b.end());
  axpy(-1.0, spmv(h.assembled(), x), r);
  const Vector v = h.solve(Hierarchy::Level::Coarse, restrict_residual(h, r));
  const auto& w = h.interpolation();
  auto xr = part(x, n, Species::Radiation);
  auto xi = part(x, n, Species::Ion);
  auto xe = part(x, n, Species::Electron);
  for (std::size_t k = 0; k < n; ++k) {
    xe[k] += v[k];
    xr[k] += w.w_r[k] * v[k];
    xi[k] += w.w_i[k] * v[k];
  }
}

void pctl_cycle(const Hierarchy& h, std::span<const double> b, std::span<double> x) {
  pre_smooth(h, b, x);
  coarse_correct(h, b, x);
  post_smooth(h, b, x);
}

// ---------------------------------------------------------------------------
// Drivers

SolveResult solve_stationary(const Hierarchy& h, std::span<const double> b, std::span<const double> x0, double eps,
                             std::size_t maxit, std::optional<std::span<const double>> exact) {
  check_lengths(h, b, x0);
  if (!(eps > 0.0)) throw Error("solve_stationary: eps must be positive");
  if (exact && exact->size() != b.size()) throw DimensionError("solve_stationary: exact solution length mismatch");
  const auto& a = h.assembled();

  SolveResult out;
  out.x.assign(x0.begin(), x0.end());
  const double bnorm = norm2(b);
  const double scale = bnorm > 0.0 ? bnorm : 1.0;
  auto residual = [&] {
    Vector r(b.begin(), b.end());
    axpy(-1.0, spmv(a, out.x), r);
    return norm2(r) / scale;
  };
  auto error_norm = [&] {
    Vector e(out.x);
    axpy(-1.0, *exact, e);
    return a_norm(a, e);
  };

  auto& stats = out.stats;
  stats.residuals.push_back(residual());
  const double e0 = exact ? error_norm() : 0.0;
  double ek = e0;
  while (stats.residuals.back() > eps && stats.iters < maxit) {
    pctl_cycle(h, b, out.x);
    ++stats.iters;
    stats.residuals.push_back(residual());
    if (exact) ek = error_norm();
  }
  stats.converged = stats.residuals.back() <= eps;
  if (stats.iters > 0) {
    const double k = static_cast<double>(stats.iters);
    if (exact && e0 > 0.0) stats.rho_observed = std::pow(ek / e0, 1.0 / k);
    else if (stats.residuals.front() > 0.0)
      stats.rho_observed = std::pow(stats.residuals.back() / stats.residuals.front(), 1.0 / k);
  }
  return out;
}

Vector apply_preconditioner(const Hierarchy& h, std::span<const double> r) {
  Vector z(r.size(), 0.0);
  pctl_cycle(h, r, z);
  return z;
}

SolveResult pcg_pctl(const Hierarchy& h, std::span<const double> b, double eps, std::size_t maxit) {
  return cg_solve(h.assembled(), b, eps, maxit, [&h](std::span<const double> r) { return apply_preconditioner(h, r); });
}

}  // namespace pctl
