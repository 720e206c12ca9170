#pragma once

#include <cstdint>
#include <optional>

#include <json.hpp>

#include "pctl/threet.hpp"

namespace pctl {

/// Scalar or per-cell field on the N x N grid (row-major, x fastest).
class CellField {
 public:
  CellField(double value = 0.0) : uniform_(value) {}  // NOLINT(google-explicit-constructor)
  explicit CellField(Vector values) : values_(std::move(values)) {}

  double operator()(std::size_t cell) const { return values_.empty() ? uniform_ : values_[cell]; }
  bool is_uniform() const { return values_.empty(); }
  std::size_t size() const { return values_.size(); }

 private:
  double uniform_ = 0.0;
  Vector values_;
};

enum class Boundary { Neumann, Dirichlet };

/// One frozen-coefficient implicit step of the 2D three-temperature
/// diffusion equations, finite volumes on an N x N grid of the unit square.
struct FvProblemConfig {
  std::size_t grid = 16;
  double dt = 1e-2;
  Boundary boundary = Boundary::Neumann;
  // diffusion coefficients with the nonlinear factors frozen in
  CellField kappa_r = 1.0;
  CellField kappa_i = 0.01;
  CellField kappa_e = 0.1;
  // exchange coefficients: c * kappa_p lumped (radiation-electron) and omega_ei
  CellField rad_coupling = 10.0;
  CellField ion_coupling = 5.0;
  // capacity factors multiplying the time derivative
  CellField cap_r = 1.0;
  CellField cap_i = 1.0;
  CellField cap_e = 1.0;

  /// Throws InfeasibleError on nonpositive capacity or dt, negative
  /// coefficients, or per-cell fields of the wrong length.
  void check() const;
};

/// A_a = (cap_a/dt) I + K(kappa_a) + |d_a| I for a in {r, i},
/// A_e = (cap_e/dt) I + K(kappa_e) + (|d_r| + |d_i|) I, d_r = -rad_coupling,
/// d_i = -ion_coupling. K is the 5-point flux stencil with harmonic-mean face
/// coefficients. The result is validated before it is returned.
ThreeTMatrix gen_fv(const FvProblemConfig& config);

/// Instances with prescribed per-row dominance strength theta and coupling
/// strength delta, built on an n_grid x n_grid graph.
struct SyntheticConfig {
  std::size_t n_grid = 4;
  double theta_r = 0.8;
  double theta_i = 0.8;
  double theta_e = 0.8;
  double delta_r = 0.3;
  double delta_i = 0.3;
  // a_kk^r : a_kk^i : a_kk^e
  double ratio_r = 1.0;
  double ratio_i = 1.0;
  double ratio_e = 1.0;
  /// Edge weights are drawn from [1 - jitter, 1 + jitter]; 0 gives the plain
  /// grid Laplacian pattern.
  double weight_jitter = 0.0;
  std::uint64_t seed = 0;

  double induced_delta_er() const { return delta_r * ratio_r / ratio_e; }
  double induced_delta_ei() const { return delta_i * ratio_i / ratio_e; }

  /// Throws InfeasibleError ("infeasible coupling target" / "infeasible
  /// dominance target") when the targets admit no valid instance.
  void check() const;
};

/// Off-diagonals -(1 - theta_a) ratio_a w_kj on grid edges, diagonal
/// ratio_a sum_j w_kj, so every row has exactly the requested theta; exchange
/// entries d_a = -delta_a a_kk^a. Deterministic in the seed.
ThreeTMatrix gen_synthetic(const SyntheticConfig& config);

/// Random feasible synthetic target: theta in [0.3, 1), delta in [0, 0.9 theta)
/// per species, random diagonal ratios with the electron ratio raised where
/// needed so the induced electron-row coupling stays below 0.9 theta_e.
SyntheticConfig random_synthetic_config(std::size_t n_grid, std::uint64_t seed);

FvProblemConfig fv_config_from_json(const nlohmann::json& j);
SyntheticConfig synthetic_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SyntheticConfig& c);
nlohmann::json to_json(const FvProblemConfig& c);

/// Small portable generator (splitmix64) so instances and sweeps are
/// reproducible across standard library implementations.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  /// Uniform in [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::uint64_t state_;
};

}  // namespace pctl
