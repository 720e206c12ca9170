#include "pctl/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pctl {

namespace {

void check_sizes(const ThreeTMatrix& m, std::span<const double> row_sums) {
  m.check_dimensions();
  if (row_sums.size() != 3 * m.n) throw DimensionError("row sums must have length 3n");
}

double positive_denominator(double v, std::size_t row) {
  if (!(v > 0.0)) {
    std::ostringstream os;
    os << "invalid instance: nonpositive bound denominator " << v << " in row " << row + 1;
    throw InvalidInstanceError(os.str());
  }
  return v;
}

}  // namespace

RowBounds beta_exact(const ThreeTMatrix& m, const Interpolation& interp, std::span<const double> s) {
  check_sizes(m, s);
  const std::size_t n = m.n;
  if (interp.w_r.size() != n || interp.w_i.size() != n) throw DimensionError("interpolation size mismatch");
  const Vector ar = m.radiation.diag(), ai = m.ion.diag();
  RowBounds out{Vector(3 * n), 0.0};

  // Fine rows: max{a (1 - w) / s, a (1 + w) / (s - 2d)}.
  for (Species sp : {Species::Radiation, Species::Ion}) {
    const std::size_t base = static_cast<std::size_t>(sp) * n;
    const Vector& a = sp == Species::Radiation ? ar : ai;
    const Vector& w = interp.weights(sp);
    const Vector& d = m.exchange(sp);
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t row = base + k;
      const double sk = positive_denominator(s[row], row);
      const double sk2 = positive_denominator(s[row] - 2.0 * d[k], row);
      out.m[row] = std::max(a[k] * (1.0 - w[k]) / sk, a[k] * (1.0 + w[k]) / sk2);
    }
  }

  // Coarse rows: three of the four sign cases; the fourth has a nonpositive
  // right-hand side and holds for every beta >= 0.
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t row = 2 * n + k;
    const double wr = interp.w_r[k], wi = interp.w_i[k];
    const double dr = m.rad_exchange[k], di = m.ion_exchange[k];
    const double rp = ar[k] * (wr * wr + wr), rm = ar[k] * (wr * wr - wr);
    const double ip = ai[k] * (wi * wi + wi), im = ai[k] * (wi * wi - wi);
    if (rm + im > 1e-12 * (ar[k] + ai[k])) {
      std::ostringstream os;
      os << "invalid instance: interpolation weight outside [0, 1] in row " << row + 1;
      throw InvalidInstanceError(os.str());
    }
    (void)positive_denominator(s[row], row);
    const double both = positive_denominator(s[row] - 2.0 * dr - 2.0 * di, row);
    const double ion_only = positive_denominator(s[row] - 2.0 * di, row);
    const double rad_only = positive_denominator(s[row] - 2.0 * dr, row);
    out.m[row] = std::max({(rp + ip) / both, (rm + ip) / ion_only, (rp + im) / rad_only});
  }
  out.beta = *std::max_element(out.m.begin(), out.m.end());
  return out;
}

double beta_simplified(const ThreeTMatrix& m, std::span<const double> s) {
  check_sizes(m, s);
  const std::size_t n = m.n;
  const Vector ar = m.radiation.diag(), ai = m.ion.diag();
  double beta = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double dr = m.rad_exchange[k], di = m.ion_exchange[k];
    const double sr = positive_denominator(s[k], k);
    const double si = positive_denominator(s[n + k], n + k);
    const double se = positive_denominator(s[2 * n + k], 2 * n + k);
    beta = std::max({beta, ar[k] / sr, 2.0 * ar[k] / (sr - 2.0 * dr), ai[k] / si, 2.0 * ai[k] / (si - 2.0 * di),
                     2.0 * ar[k] / (se - 2.0 * dr), 2.0 * ai[k] / (se - 2.0 * di),
                     2.0 * (ar[k] + ai[k]) / (se - 2.0 * dr - 2.0 * di)});
  }
  return beta;
}

double beta_parametric(const DominanceProfile& p, const DiagonalRatios& ratios) {
  const std::size_t n = p.theta_r.size();
  if (ratios.rad_over_electron.size() != n || ratios.ion_over_electron.size() != n) {
    throw DimensionError("beta_parametric: ratio length mismatch");
  }
  double beta = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double tr = p.theta_r[k], ti = p.theta_i[k], te = p.theta_e[k];
    const double dr = p.delta_r[k], di = p.delta_i[k], der = p.delta_er[k], dei = p.delta_ei[k];
    const double margins[] = {tr - dr, ti - di, te - der - dei};
    for (double margin : margins) {
      if (!(margin > 0.0)) {
        throw InfeasibleError("beta_parametric: infeasible profile (theta - delta <= 0) in row " +
                              std::to_string(k + 1));
      }
    }
    const double rr = ratios.rad_over_electron[k], ri = ratios.ion_over_electron[k];
    beta = std::max({beta, 1.0 / (tr - dr), 2.0 / (tr + dr), 1.0 / (ti - di), 2.0 / (ti + di),
                     rr * 2.0 / (te + der - dei), ri * 2.0 / (te + dei - der),
                     (rr + ri) * 2.0 / (te + der + dei)});
  }
  return beta;
}

double kappa(double beta) {
  if (!(beta > 0.0)) throw Error("kappa: beta must be positive");
  return 1.0 - 1.0 / (4.0 * beta);
}

const char* to_string(CouplingBranch b) {
  switch (b) {
    case CouplingBranch::Small: return "small_coupling";
    case CouplingBranch::Tie: return "tie";
    case CouplingBranch::Large: return "large_coupling";
  }
  return "?";
}

ExampleKappa example_kappa(double theta, double delta) {
  if (!(theta > 0.0 && theta <= 1.0)) throw InfeasibleError("example_kappa: theta must lie in (0, 1]");
  if (!(delta >= 0.0 && delta < theta)) throw InfeasibleError("example_kappa: delta must lie in [0, theta)");
  const double large = 1.0 - (theta - delta) / 4.0;
  const double small = 1.0 - (theta + 2.0 * delta) / 16.0;
  // 4 (theta - delta) = theta + 2 delta  <=>  2 delta = theta
  const double twice = 2.0 * delta;
  const CouplingBranch branch =
      twice < theta ? CouplingBranch::Small : (twice == theta ? CouplingBranch::Tie : CouplingBranch::Large);
  return {std::max(large, small), branch};
}

IdentityCheck identity_check(const ThreeTMatrix& m, const Interpolation& interp, std::span<const double> s) {
  check_sizes(m, s);
  const std::size_t n = m.n;
  IdentityCheck out;
  out.lhs.resize(2 * n);
  out.rhs.resize(2 * n);
  for (Species sp : {Species::Radiation, Species::Ion}) {
    const std::size_t base = static_cast<std::size_t>(sp) * n;
    const Vector z = chol_factor(m.block(sp)).solve(s.subspan(base, n));
    const Vector& w = interp.weights(sp);
    for (std::size_t k = 0; k < n; ++k) {
      out.lhs[base + k] = 1.0 - w[k];
      out.rhs[base + k] = z[k];
      out.max_disagreement = std::max(out.max_disagreement, std::abs(out.lhs[base + k] - z[k]));
      if (!(out.lhs[base + k] > 0.0 && out.lhs[base + k] <= 1.0)) out.in_range = false;
    }
  }
  return out;
}

BoundReport compute_bounds(const Hierarchy& h) {
  const auto& m = h.matrix();
  BoundReport r;
  r.profile = dominance_profile(m);
  const auto rows = beta_exact(m, h.interpolation(), r.profile.row_sums);
  r.m = rows.m;
  r.beta_exact = rows.beta;
  r.beta_simplified = beta_simplified(m, r.profile.row_sums);
  r.beta_parametric = beta_parametric(r.profile, diagonal_ratios(m));
  r.kappa_exact = kappa(r.beta_exact);
  r.kappa_simplified = kappa(r.beta_simplified);
  r.kappa_parametric = kappa(r.beta_parametric);
  r.identity = identity_check(m, h.interpolation(), r.profile.row_sums);
  return r;
}

nlohmann::json to_json(const BoundReport& r) {
  const auto& p = r.profile;
  return {{"m", r.m},
          {"beta_exact", r.beta_exact},
          {"beta_simplified", r.beta_simplified},
          {"beta_parametric", r.beta_parametric},
          {"alpha1", r.alpha1},
          {"kappa_exact", r.kappa_exact},
          {"kappa_simplified", r.kappa_simplified},
          {"kappa_parametric", r.kappa_parametric},
          {"identity_check",
           {{"lhs", r.identity.lhs},
            {"rhs", r.identity.rhs},
            {"max_disagreement", r.identity.max_disagreement},
            {"in_range", r.identity.in_range}}},
          {"profile",
           {{"theta_r", p.theta_r},
            {"theta_i", p.theta_i},
            {"theta_e", p.theta_e},
            {"delta_r", p.delta_r},
            {"delta_i", p.delta_i},
            {"delta_er", p.delta_er},
            {"delta_ei", p.delta_ei},
            {"row_sums", p.row_sums}}}};
}

}  // namespace pctl
