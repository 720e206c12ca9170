#include "pctl/threet.hpp"

#include <cmath>
#include <sstream>

#include "pctl/dense.hpp"

namespace pctl {

const SparseSym& ThreeTMatrix::block(Species s) const {
  switch (s) {
    case Species::Radiation: return radiation;
    case Species::Ion: return ion;
    case Species::Electron: return electron;
  }
  throw Error("unknown species");
}

const Vector& ThreeTMatrix::exchange(Species s) const {
  if (s == Species::Radiation) return rad_exchange;
  if (s == Species::Ion) return ion_exchange;
  throw Error("electron block has no exchange diagonal");
}

void ThreeTMatrix::check_dimensions() const {
  auto fail = [&](const std::string& what, std::size_t got) {
    throw DimensionError(what + " has dimension " + std::to_string(got) + ", expected " + std::to_string(n));
  };
  if (n == 0) throw DimensionError("3T system with n = 0");
  if (radiation.size() != n) fail("A_r", radiation.size());
  if (ion.size() != n) fail("A_i", ion.size());
  if (electron.size() != n) fail("A_e", electron.size());
  if (rad_exchange.size() != n) fail("d_r", rad_exchange.size());
  if (ion_exchange.size() != n) fail("d_i", ion_exchange.size());
}

bool ValidationReport::ok() const {
  for (const auto& c : checks)
    if (!c.passed) return false;
  return true;
}

const PropertyCheck* ValidationReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  for (const auto& c : checks) {
    os << (c.passed ? "PASS " : "FAIL ") << c.name;
    if (auto k = c.first_offending()) os << " (first offending row " << *k << ")";
    if (!c.note.empty()) os << " - " << c.note;
    os << '\n';
  }
  for (const auto& w : warnings) os << "warning: " << w << '\n';
  return os.str();
}

namespace {

PropertyCheck check_dominance(const SparseSym& full) {
  PropertyCheck c{"diagonal_dominance", true, {}, {}};
  for (std::size_t k = 0; k < full.size(); ++k) {
    double diag = 0.0, off = 0.0;
    auto cols = full.row_cols(k);
    auto vals = full.row_vals(k);
    for (std::size_t j = 0; j < cols.size(); ++j) {
      if (cols[j] == k) diag = vals[j];
      else off += std::abs(vals[j]);
    }
    if (!(diag > off)) {
      c.passed = false;
      c.offending.push_back(k + 1);
    }
  }
  if (!c.passed) c.note = "a_kk > sum_{j!=k} |a_kj| violated";
  return c;
}

PropertyCheck check_sign_pattern(const ThreeTMatrix& m) {
  PropertyCheck c{"m_matrix_sign", true, {}, {}};
  for (Species s : {Species::Radiation, Species::Ion, Species::Electron}) {
    const auto& a = m.block(s);
    const std::size_t base = static_cast<std::size_t>(s) * m.n;
    for (std::size_t k = 0; k < a.size(); ++k) {
      auto cols = a.row_cols(k);
      auto vals = a.row_vals(k);
      bool bad = false;
      for (std::size_t j = 0; j < cols.size(); ++j) {
        if (cols[j] == k ? !(vals[j] > 0.0) : vals[j] > 0.0) bad = true;
      }
      if (bad) {
        c.passed = false;
        c.offending.push_back(base + k + 1);
      }
    }
  }
  if (!c.passed) c.note = "block needs positive diagonal and nonpositive off-diagonals";
  return c;
}

PropertyCheck check_couplings(const ThreeTMatrix& m, ValidationReport& report) {
  PropertyCheck c{"coupling_sign", true, {}, {}};
  std::size_t zeros = 0;
  for (Species s : {Species::Radiation, Species::Ion}) {
    const auto& d = m.exchange(s);
    const std::size_t base = static_cast<std::size_t>(s) * m.n;
    for (std::size_t k = 0; k < d.size(); ++k) {
      if (d[k] > 0.0 || std::isnan(d[k])) {
        c.passed = false;
        c.offending.push_back(base + k + 1);
      } else if (d[k] == 0.0) {
        ++zeros;
      }
    }
  }
  if (!c.passed) {
    c.note = "exchange entries must be <= 0";
  } else if (zeros == 2 * m.n) {
    report.decoupled = true;
    c.note = "decoupled (all exchange entries zero)";
    report.warnings.push_back("system is decoupled: all exchange entries are zero");
  } else if (zeros > 0) {
    report.warnings.push_back(std::to_string(zeros) + " zero exchange entries accepted");
  }
  return c;
}

PropertyCheck check_block_spd(const ThreeTMatrix& m) {
  PropertyCheck c{"spd_blocks", true, {}, {}};
  for (Species s : {Species::Radiation, Species::Ion}) {
    try {
      (void)chol_factor(m.block(s));
    } catch (const NotSpdError& e) {
      c.passed = false;
      c.offending.push_back(static_cast<std::size_t>(s) * m.n + e.index());
    }
  }
  if (!c.passed) c.note = "Cholesky failed";
  return c;
}

PropertyCheck check_schur(const ThreeTMatrix& m, std::size_t dense_cap) {
  PropertyCheck c{"schur_spd", true, {}, {}};
  if (3 * m.n > dense_cap) {
    c.note = "assumed (implied by diagonal dominance)";
    return c;
  }
  const auto n = static_cast<Eigen::Index>(m.n);
  DenseMatrix schur = to_dense(m.electron, dense_cap);
  for (Species s : {Species::Radiation, Species::Ion}) {
    const DenseMatrix a = to_dense(m.block(s), dense_cap);
    Eigen::LLT<DenseMatrix> llt(a);
    if (llt.info() != Eigen::Success) {
      c.passed = false;
      c.note = "species block not SPD";
      return c;
    }
    const Eigen::Map<const Eigen::VectorXd> d(m.exchange(s).data(), n);
    const DenseMatrix dm = d.asDiagonal();
    schur -= dm * llt.solve(dm);
  }
  const double lmin = dense_sym_eig(DenseSym(symmetric_part(schur), dense_cap, 1e-12)).front();
  std::ostringstream os;
  os << "lambda_min = " << lmin;
  c.note = os.str();
  if (!(lmin > 0.0)) c.passed = false;
  return c;
}

}  // namespace

ValidationReport validate(const ThreeTMatrix& m, std::size_t dense_cap) {
  ValidationReport report;
  try {
    m.check_dimensions();
  } catch (const DimensionError& e) {
    report.checks.push_back({"dimensions", false, {}, e.what()});
    return report;
  }
  report.checks.push_back({"dimensions", true, {}, {}});
  report.checks.push_back(check_dominance(assemble_full(m)));
  report.checks.push_back(check_sign_pattern(m));
  report.checks.push_back(check_couplings(m, report));
  report.checks.push_back(check_block_spd(m));
  report.checks.push_back(check_schur(m, dense_cap));
  return report;
}

SparseSym assemble_full(const ThreeTMatrix& m) {
  m.check_dimensions();
  const std::size_t n = m.n;
  std::vector<Triplet> t;
  t.reserve(m.radiation.nonzeros() + m.ion.nonzeros() + m.electron.nonzeros() + 4 * n);
  for (Species s : {Species::Radiation, Species::Ion, Species::Electron}) {
    const auto& a = m.block(s);
    const std::size_t base = static_cast<std::size_t>(s) * n;
    for (std::size_t k = 0; k < n; ++k) {
      auto cols = a.row_cols(k);
      auto vals = a.row_vals(k);
      for (std::size_t j = 0; j < cols.size(); ++j) t.push_back({base + k, base + cols[j], vals[j]});
    }
  }
  for (Species s : {Species::Radiation, Species::Ion}) {
    const auto& d = m.exchange(s);
    const std::size_t base = static_cast<std::size_t>(s) * n;
    for (std::size_t k = 0; k < n; ++k) {
      if (d[k] == 0.0) continue;
      t.push_back({base + k, 2 * n + k, d[k]});
      t.push_back({2 * n + k, base + k, d[k]});
    }
  }
  return SparseSym::from_triplets(3 * n, t, 0.0);
}

ThreeTMatrix split_full(const SparseSym& full, std::size_t n) {
  if (full.size() != 3 * n) throw DimensionError("split_full: matrix is not 3n x 3n");
  ThreeTMatrix m;
  m.n = n;
  m.rad_exchange.assign(n, 0.0);
  m.ion_exchange.assign(n, 0.0);
  std::vector<Triplet> blocks[3];
  for (std::size_t row = 0; row < 3 * n; ++row) {
    const std::size_t bi = row / n;
    const std::size_t k = row % n;
    auto cols = full.row_cols(row);
    auto vals = full.row_vals(row);
    for (std::size_t q = 0; q < cols.size(); ++q) {
      const std::size_t bj = cols[q] / n;
      const std::size_t j = cols[q] % n;
      if (bi == bj) {
        blocks[bi].push_back({k, j, vals[q]});
      } else if (bi == 2 || bj == 2) {
        if (k != j) throw InvalidInstanceError("split_full: exchange block is not diagonal");
        if (bi == 2) (bj == 0 ? m.rad_exchange : m.ion_exchange)[k] = vals[q];
      } else {
        throw InvalidInstanceError("split_full: nonzero radiation-ion block");
      }
    }
  }
  m.radiation = SparseSym::from_triplets(n, blocks[0], 0.0);
  m.ion = SparseSym::from_triplets(n, blocks[1], 0.0);
  m.electron = SparseSym::from_triplets(n, blocks[2], 0.0);
  return m;
}

DominanceProfile dominance_profile(const ThreeTMatrix& m) {
  m.check_dimensions();
  const std::size_t n = m.n;
  DominanceProfile p;
  const Vector dr = m.radiation.diag(), di = m.ion.diag(), de = m.electron.diag();
  for (std::size_t k = 0; k < n; ++k) {
    if (!(dr[k] > 0.0) || !(di[k] > 0.0) || !(de[k] > 0.0)) {
      throw InvalidInstanceError("dominance_profile: nonpositive diagonal in row " + std::to_string(k + 1));
    }
  }
  const Vector sr = m.radiation.row_sums(), si = m.ion.row_sums(), se = m.electron.row_sums();
  p.theta_r.resize(n);
  p.theta_i.resize(n);
  p.theta_e.resize(n);
  p.delta_r.resize(n);
  p.delta_i.resize(n);
  p.delta_er.resize(n);
  p.delta_ei.resize(n);
  p.row_sums.resize(3 * n);
  for (std::size_t k = 0; k < n; ++k) {
    const double gr = std::abs(m.rad_exchange[k]);
    const double gi = std::abs(m.ion_exchange[k]);
    p.theta_r[k] = sr[k] / dr[k];
    p.theta_i[k] = si[k] / di[k];
    p.theta_e[k] = se[k] / de[k];
    p.delta_r[k] = gr / dr[k];
    p.delta_i[k] = gi / di[k];
    p.delta_er[k] = gr / de[k];
    p.delta_ei[k] = gi / de[k];
    p.row_sums[k] = sr[k] + m.rad_exchange[k];
    p.row_sums[n + k] = si[k] + m.ion_exchange[k];
    p.row_sums[2 * n + k] = se[k] + m.rad_exchange[k] + m.ion_exchange[k];
  }
  return p;
}

DiagonalRatios diagonal_ratios(const ThreeTMatrix& m) {
  const Vector dr = m.radiation.diag(), di = m.ion.diag(), de = m.electron.diag();
  DiagonalRatios r;
  r.rad_over_electron.resize(m.n);
  r.ion_over_electron.resize(m.n);
  for (std::size_t k = 0; k < m.n; ++k) {
    r.rad_over_electron[k] = dr[k] / de[k];
    r.ion_over_electron[k] = di[k] / de[k];
  }
  return r;
}

}  // namespace pctl
