#pragma once

#include <json.hpp>

#include "pctl/solver.hpp"

namespace pctl {

/// Smoothing constant of the block Gauss-Seidel post-smoother.
inline constexpr double kSmoothingAlpha = 0.25;

struct RowBounds {
  Vector m;     // 3n per-row bounds
  double beta;  // max over m
};

/// Row-wise approximation-property bounds m_k. The sums sum_j b_kj d_j over
/// the inverse blocks are taken from the interpolation weights (-w), so no
/// inverse entries are formed. Throws InvalidInstanceError naming the row if
/// any denominator s_k, s_k - 2d_k, ... is not positive.
RowBounds beta_exact(const ThreeTMatrix& m, const Interpolation& interp, std::span<const double> row_sums);

/// The seven-term simplification of the row bounds; always >= beta_exact.
double beta_simplified(const ThreeTMatrix& m, std::span<const double> row_sums);

/// The same seven terms written in dominance and coupling strengths, with
/// per-row diagonal ratios a_kk^r / a_kk^e and a_kk^i / a_kk^e.
/// Throws InfeasibleError if theta - delta <= 0 in some row.
double beta_parametric(const DominanceProfile& profile, const DiagonalRatios& ratios);

/// 1 - 1 / (4 beta); throws Error if beta <= 0.
double kappa(double beta);

enum class CouplingBranch { Small, Tie, Large };
const char* to_string(CouplingBranch b);

struct ExampleKappa {
  double kappa;
  CouplingBranch branch;  // Small: 1 - (theta + 2 delta)/16, Large: 1 - (theta - delta)/4
};

/// Closed-form bound for equal diagonals and uniform theta, delta:
/// max{1 - (theta - delta)/4, 1 - (theta + 2 delta)/16}. The large-coupling
/// branch takes over at delta = theta / 2. Throws InfeasibleError unless
/// 0 < theta <= 1 and 0 <= delta < theta.
ExampleKappa example_kappa(double theta, double delta);

/// Per-row check of 1 + sum_j b_kj d_j = sum_j b_kj s_j > 0 for the radiation
/// (rows 0..n-1) and ion (rows n..2n-1) blocks.
struct IdentityCheck {
  Vector lhs;  // 1 - w
  Vector rhs;  // (A_a^-1 s_a)_k
  double max_disagreement = 0.0;
  bool in_range = true;  // every lhs in (0, 1]
  bool passed(double tol = defaults::kIdentityTol) const { return in_range && max_disagreement <= tol; }
};

IdentityCheck identity_check(const ThreeTMatrix& m, const Interpolation& interp, std::span<const double> row_sums);

struct BoundReport {
  Vector m;
  double beta_exact = 0.0;
  double beta_simplified = 0.0;
  double beta_parametric = 0.0;
  double alpha1 = kSmoothingAlpha;
  double kappa_exact = 0.0;
  double kappa_simplified = 0.0;
  double kappa_parametric = 0.0;
  IdentityCheck identity;
  DominanceProfile profile;
};

BoundReport compute_bounds(const Hierarchy& h);

nlohmann::json to_json(const BoundReport& r);

}  // namespace pctl
