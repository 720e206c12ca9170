#pragma once

#include <array>
#include <memory>
#include <optional>

#include "pctl/threet.hpp"

namespace pctl {

/// Diagonals of the radiation and ion interpolation blocks. The prolongation
/// is P = [diag(w_r); diag(w_i); I] with the electron unknowns as the coarse
/// level; w_a = -A_a^-1 d_a makes P_a reproduce the ideal interpolation
/// -A_a^-1 D_a on the constant vector.
struct Interpolation {
  Vector w_r;
  Vector w_i;

  const Vector& weights(Species s) const { return s == Species::Radiation ? w_r : w_i; }
};

Interpolation build_interpolation(const ThreeTMatrix& m, const CholFactor& rad_factor, const CholFactor& ion_factor);

/// Galerkin coarse operator P' A P, assembled block-wise by diagonal scaling:
/// W_r A_r W_r + W_i A_i W_i + A_e + 2 D_r W_r + 2 D_i W_i.
SparseSym build_coarse_operator(const ThreeTMatrix& m, const Interpolation& interp);

enum class SubSolve {
  Direct,   // sparse Cholesky
  InnerCg,  // CG to a tight relative tolerance, for memory-constrained runs
};

struct HierarchyOptions {
  SubSolve sub_solve = SubSolve::Direct;
  double inner_tol = defaults::kInnerCgTol;
  Ordering ordering = Ordering::ReverseCuthillMcKee;
};

/// Set-up state of the two-level method: the system, its interpolation, the
/// coarse operator and solvers for A_r, A_i, A_e and A_c. Immutable once
/// built; concurrent solves may share one instance.
class Hierarchy {
 public:
  enum class Level { Radiation, Ion, Electron, Coarse };

  /// Throws NotSpdError if any block or the coarse operator is not SPD.
  explicit Hierarchy(ThreeTMatrix m, HierarchyOptions options = {});

  const ThreeTMatrix& matrix() const { return matrix_; }
  const SparseSym& assembled() const { return full_; }
  const Interpolation& interpolation() const { return interp_; }
  const SparseSym& coarse() const { return coarse_; }
  const HierarchyOptions& options() const { return options_; }
  std::size_t n() const { return matrix_.n; }

  /// Exact (or inner-CG) solve with one of the four operators.
  Vector solve(Level level, std::span<const double> rhs) const;

 private:
  struct LevelSolver;
  ThreeTMatrix matrix_;
  HierarchyOptions options_;
  SparseSym full_;
  Interpolation interp_;
  SparseSym coarse_;
  std::array<std::shared_ptr<const LevelSolver>, 4> solvers_;
};

/// C/F block smoothing: electron block first, then radiation and ion with the
/// updated electron values. Error propagator I - M^-T A.
void pre_smooth(const Hierarchy& h, std::span<const double> b, std::span<double> x);
/// r_c = P'(b - A x), v = A_c^-1 r_c, x += P v.
void coarse_correct(const Hierarchy& h, std::span<const double> b, std::span<double> x);
/// F/C block smoothing: radiation and ion first, then electron. Error
/// propagator I - M^-1 A with M the block lower triangle of A.
void post_smooth(const Hierarchy& h, std::span<const double> b, std::span<double> x);
/// pre_smooth, coarse_correct, post_smooth.
void pctl_cycle(const Hierarchy& h, std::span<const double> b, std::span<double> x);

/// P' r for a full-length r.
Vector restrict_residual(const Hierarchy& h, std::span<const double> r);

/// Stationary iteration of pctl_cycle until ||b - A x||_2 / ||b||_2 <= eps.
/// Running out of iterations is reported through stats.converged, not thrown.
/// With `exact` given, rho_observed is the geometric mean A-norm error
/// contraction; otherwise it is the residual contraction.
SolveResult solve_stationary(const Hierarchy& h, std::span<const double> b, std::span<const double> x0, double eps,
                             std::size_t maxit, std::optional<std::span<const double>> exact = std::nullopt);

/// One cycle from a zero initial guess applied to `r`: the symmetric
/// positive definite two-level preconditioner.
Vector apply_preconditioner(const Hierarchy& h, std::span<const double> r);

/// CG on the assembled operator preconditioned by apply_preconditioner.
SolveResult pcg_pctl(const Hierarchy& h, std::span<const double> b, double eps, std::size_t maxit);

}  // namespace pctl
