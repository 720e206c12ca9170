#pragma once

#include <json.hpp>

#include "pctl/bounds.hpp"
#include "pctl/dense.hpp"

namespace pctl {

/// Dense operators of a 3T system for the desk-scale oracles.
struct DenseOperators {
  DenseMatrix a;  // assembled system
  DenseMatrix m;  // block lower triangle: A_r, A_i on the diagonal, [D_r D_i A_e] last
  Eigen::VectorXd d;  // diag(A)
  DenseMatrix p;  // 3n x n prolongation [diag(w_r); diag(w_i); I]
};

DenseOperators dense_operators(const ThreeTMatrix& m, const Interpolation& interp,
                               std::size_t cap = defaults::kDenseCap);

struct SmoothingCheck {
  double lambda_min = 0.0;  // of S = (M + M' - A) - alpha1 M' D^-1 M
  double norm = 0.0;        // spectral norm of S
  double alpha1 = kSmoothingAlpha;
  double alpha1_max = 0.0;  // 1 / lambda_max(H): largest alpha1 with S PSD
  double h_lambda_max = 0.0;  // lambda_max of H = (M + M' - A)^-1 M' D^-1 M
  bool passed = false;
};

/// Throws DimensionError if 3n exceeds the cap.
SmoothingCheck check_smoothing(const ThreeTMatrix& m, std::size_t cap = defaults::kDenseCap);

struct ApproxCheck {
  double beta_used = 0.0;
  double lambda_min = 0.0;  // of Q(beta)
  double norm = 0.0;
  bool passed = false;
};

/// Q(beta) = beta A - X where X is the block form of the diagonally weighted
/// interpolation defect ||e_F - P_FC e_C||^2_{D_F}.
ApproxCheck check_approximation(const ThreeTMatrix& m, const Interpolation& interp, double beta,
                                std::size_t cap = defaults::kDenseCap);

/// b = 0 error propagation from a random error of unit A-norm. Geometric mean
/// of the per-cycle A-norm contraction over the last cycles - skip cycles;
/// if the error falls below the floor the largest ratio seen is returned.
/// Throws Error if cycles < 10.
double measure_convergence_factor(const Hierarchy& h, std::size_t cycles = defaults::kRhoCycles,
                                  std::uint64_t seed = 0);

struct TwoGridIdentityReport {
  double E_norm_direct = 0.0;
  double K = 0.0;
  double identity_residual = 0.0;  // |E_norm_direct - (1 - 1/K)|
  double G2T_norm = 0.0;
  double square_residual = 0.0;  // |E_norm_direct - G2T_norm^2|
  bool passed(double tol = defaults::kChainSlack) const {
    return identity_residual <= tol && square_residual <= tol;
  }
};

/// Dense two-grid error propagator E = G2 T G1 and its characterization
/// through M~ = S'(S + S' - A)^-1 S with S = M' the pre-smoother, i.e.
/// M~ = M (M + M' - A)^-1 M'.
TwoGridIdentityReport exact_E_norm(const Hierarchy& h, std::size_t cap = defaults::kDenseCap);

/// ||B||_A = ||L' B L^-T||_2 with A = L L'.
double a_norm_operator(const DenseMatrix& b, const DenseMatrix& a);

struct BoundChain {
  double rho_observed = 0.0;
  std::optional<double> e_norm;
  double kappa_exact = 0.0;
  double kappa_simplified = 0.0;
  bool rho_le_e = true;
  bool e_le_kappa = true;
  bool rho_le_kappa = true;
  bool kappa_le_simplified = true;
  bool ok() const { return rho_le_e && e_le_kappa && rho_le_kappa && kappa_le_simplified; }
  std::string diagnostic() const;
};

BoundChain check_bound_ordering(double rho_observed, std::optional<double> e_norm, double kappa_exact,
                                double kappa_simplified, double slack = defaults::kChainSlack);

/// Measures rho_obs and, within the cap, the dense ||E||_A, then checks the chain.
BoundChain check_bound_ordering(const Hierarchy& h, const BoundReport& report,
                                std::size_t cap = defaults::kDenseCap, std::uint64_t seed = 0);

struct VerifyReport {
  ValidationReport validation;
  BoundReport bounds;
  std::optional<SmoothingCheck> smoothing;
  std::optional<ApproxCheck> approximation;
  std::optional<TwoGridIdentityReport> identity;
  BoundChain chain;
  bool interpolation_ok = false;

  bool ok() const;
  /// Name of the first failing check, empty if all pass.
  std::string first_failure() const;
};

/// Runs every oracle that fits the cap. Throws InvalidInstanceError if the
/// instance does not validate.
VerifyReport verify_instance(const ThreeTMatrix& m, std::size_t cap = defaults::kDenseCap, std::uint64_t seed = 0);

nlohmann::json to_json(const SmoothingCheck& c);
nlohmann::json to_json(const ApproxCheck& c);
nlohmann::json to_json(const TwoGridIdentityReport& r);
nlohmann::json to_json(const BoundChain& c);
nlohmann::json to_json(const VerifyReport& r);

/// Residual check ||A_a w_a + d_a||_2 <= tol ||d_a||_2 and 0 <= w < 1.
bool interpolation_constraint_holds(const ThreeTMatrix& m, const Interpolation& interp, double rel_tol = 1e-12);

}  // namespace pctl
