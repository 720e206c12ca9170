#pragma once

#include <optional>
#include <string>

#include "pctl/sparse.hpp"

namespace pctl {

enum class Species { Radiation, Ion, Electron };

/// Three-temperature block system
///
///     [ A_r   0     D_r ] [x_r]   [b_r]
///     [ 0     A_i   D_i ] [x_i] = [b_i]
///     [ D_r   D_i   A_e ] [x_e]   [b_e]
///
/// with diagonal exchange blocks D_r, D_i stored as vectors. Unknowns are
/// ordered radiation, ion, electron in every full-length vector.
struct ThreeTMatrix {
  std::size_t n = 0;  // unknowns per species
  SparseSym radiation;
  SparseSym ion;
  SparseSym electron;
  Vector rad_exchange;  // diagonal of D_r, entries <= 0
  Vector ion_exchange;  // diagonal of D_i, entries <= 0

  const SparseSym& block(Species s) const;
  /// Exchange diagonal coupling `s` (Radiation or Ion) to the electrons.
  const Vector& exchange(Species s) const;

  /// Throws DimensionError if block sizes disagree with n.
  void check_dimensions() const;

  friend bool operator==(const ThreeTMatrix&, const ThreeTMatrix&) = default;
};

struct PropertyCheck {
  std::string name;
  bool passed = true;
  std::vector<std::size_t> offending;  // 1-based rows of the assembled system
  std::string note;

  std::optional<std::size_t> first_offending() const {
    if (offending.empty()) return std::nullopt;
    return offending.front();
  }
};

struct ValidationReport {
  std::vector<PropertyCheck> checks;
  std::vector<std::string> warnings;
  bool decoupled = false;

  bool ok() const;
  const PropertyCheck* find(const std::string& name) const;
  std::string summary() const;
};

/// Checks strict diagonal dominance, the M-matrix sign pattern of each block,
/// nonpositive exchange entries, SPD of the species blocks and of the
/// electron Schur complement. The Schur complement is checked densely only
/// when 3n <= dense_cap; above that it is reported as implied by dominance.
ValidationReport validate(const ThreeTMatrix& m, std::size_t dense_cap = defaults::kDenseCap);

/// 3n x 3n assembled operator.
SparseSym assemble_full(const ThreeTMatrix& m);

/// Inverse of assemble_full. Throws InvalidInstanceError if the matrix does
/// not have the 3T block structure (nonzero r-i block, non-diagonal exchange).
ThreeTMatrix split_full(const SparseSym& full, std::size_t n);

/// Per-row dominance and coupling strengths.
struct DominanceProfile {
  Vector theta_r, theta_i, theta_e;  // row sum of A_a over its diagonal
  Vector delta_r, delta_i;           // |d| over the species diagonal
  Vector delta_er, delta_ei;         // |d| over the electron diagonal
  Vector row_sums;                   // 3n row sums of the assembled system
};

DominanceProfile dominance_profile(const ThreeTMatrix& m);

/// Per-row diagonal ratios a_kk^r / a_kk^e and a_kk^i / a_kk^e.
struct DiagonalRatios {
  Vector rad_over_electron;
  Vector ion_over_electron;
};

DiagonalRatios diagonal_ratios(const ThreeTMatrix& m);

/// Full-length vector helpers for the [r; i; e] layout.
inline std::span<double> part(std::span<double> x, std::size_t n, Species s) {
  return x.subspan(static_cast<std::size_t>(s) * n, n);
}
inline std::span<const double> part(std::span<const double> x, std::size_t n, Species s) {
  return x.subspan(static_cast<std::size_t>(s) * n, n);
}
inline std::span<double> part(Vector& x, std::size_t n, Species s) {
  return part(std::span<double>(x), n, s);
}
inline std::span<const double> part(const Vector& x, std::size_t n, Species s) {
  return part(std::span<const double>(x), n, s);
}

}  // namespace pctl
