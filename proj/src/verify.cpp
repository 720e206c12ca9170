#include "pctl/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pctl/problem_gen.hpp"

namespace pctl {

namespace {

using Eigen::Index;

Index idx(std::size_t i) { return static_cast<Index>(i); }

struct Spectrum {
  double min;
  double norm;
};

Spectrum spectrum(const DenseMatrix& s) {
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(symmetric_part(s), Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  return {ev.minCoeff(), std::max(std::abs(ev.minCoeff()), std::abs(ev.maxCoeff()))};
}

bool spsd(const Spectrum& s) { return s.min >= -defaults::kSpsdRelTol * s.norm; }

// M' D^-1 M
DenseMatrix weighted_gram(const DenseOperators& op) {
  return op.m.transpose() * op.d.cwiseInverse().asDiagonal() * op.m;
}

}  // namespace

DenseOperators dense_operators(const ThreeTMatrix& m, const Interpolation& interp, std::size_t cap) {
  const std::size_t n = m.n;
  check_dense_cap(3 * n, cap, "dense_operators");
  DenseOperators op;
  op.a = to_dense(assemble_full(m), cap);
  op.m = op.a;
  op.m.block(0, idx(2 * n), idx(2 * n), idx(n)).setZero();
  op.d = op.a.diagonal();
  op.p = DenseMatrix::Zero(idx(3 * n), idx(n));
  for (std::size_t k = 0; k < n; ++k) {
    op.p(idx(k), idx(k)) = interp.w_r[k];
    op.p(idx(n + k), idx(k)) = interp.w_i[k];
    op.p(idx(2 * n + k), idx(k)) = 1.0;
  }
  return op;
}

SmoothingCheck check_smoothing(const ThreeTMatrix& m, std::size_t cap) {
  check_dense_cap(3 * m.n, cap, "check_smoothing");
  const DenseOperators op = dense_operators(m, Interpolation{Vector(m.n), Vector(m.n)}, cap);
  const DenseMatrix sym = op.m + op.m.transpose() - op.a;
  const DenseMatrix gram = weighted_gram(op);
  SmoothingCheck c;
  const Spectrum s = spectrum(sym - c.alpha1 * gram);
  c.lambda_min = s.min;
  c.norm = s.norm;
  c.passed = spsd(s);
  c.h_lambda_max = generalized_lambda_max(gram, sym);
  c.alpha1_max = 1.0 / c.h_lambda_max;
  return c;
}

ApproxCheck check_approximation(const ThreeTMatrix& m, const Interpolation& interp, double beta, std::size_t cap) {
  const std::size_t n = m.n;
  const DenseOperators op = dense_operators(m, interp, cap);
  // X = [[D_r, 0, -D_r P_r], [0, D_i, -D_i P_i], [-P_r D_r, -P_i D_i, P_r D_r P_r + P_i D_i P_i]]
  DenseMatrix x = DenseMatrix::Zero(idx(3 * n), idx(3 * n));
  for (std::size_t k = 0; k < n; ++k) {
    const double dr = op.d(idx(k)), di = op.d(idx(n + k));
    const double wr = interp.w_r[k], wi = interp.w_i[k];
    const Index r = idx(k), i = idx(n + k), e = idx(2 * n + k);
    x(r, r) = dr;
    x(i, i) = di;
    x(r, e) = x(e, r) = -dr * wr;
    x(i, e) = x(e, i) = -di * wi;
    x(e, e) = wr * dr * wr + wi * di * wi;
  }
  ApproxCheck c;
  c.beta_used = beta;
  const Spectrum s = spectrum(beta * op.a - x);
  c.lambda_min = s.min;
  c.norm = s.norm;
  c.passed = spsd(s);
  return c;
}

double measure_convergence_factor(const Hierarchy& h, std::size_t cycles, std::uint64_t seed) {
  if (cycles < 10) throw Error("measure_convergence_factor: need at least 10 cycles");
  const auto& a = h.assembled();
  SplitMix64 rng(seed);
  Vector e(a.size());
  for (double& v : e) v = rng.uniform(-1.0, 1.0);
  const double e0 = a_norm(a, e);
  if (e0 == 0.0) return 0.0;
  for (double& v : e) v /= e0;

  const Vector zero(a.size(), 0.0);
  std::vector<double> ratios;
  double prev = 1.0;
  for (std::size_t c = 0; c < cycles; ++c) {
    pctl_cycle(h, zero, e);
    const double cur = a_norm(a, e);
    ratios.push_back(cur / prev);
    if (cur < defaults::kErrorFloor) return *std::max_element(ratios.begin(), ratios.end());
    prev = cur;
  }
  double log_sum = 0.0;
  for (std::size_t c = defaults::kRhoSkip; c < cycles; ++c) log_sum += std::log(ratios[c]);
  return std::exp(log_sum / static_cast<double>(cycles - defaults::kRhoSkip));
}

double a_norm_operator(const DenseMatrix& b, const DenseMatrix& a) {
  Eigen::LLT<DenseMatrix> llt(symmetric_part(a));
  if (llt.info() != Eigen::Success) throw NotSpdError("a_norm_operator: A not SPD", 0);
  const DenseMatrix l = llt.matrixL();
  // L' B L^-T
  DenseMatrix t = l.transpose() * b;
  t = l.triangularView<Eigen::Lower>().solve(t.transpose()).transpose();
  Eigen::JacobiSVD<DenseMatrix> svd(t);
  return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
}

TwoGridIdentityReport exact_E_norm(const Hierarchy& h, std::size_t cap) {
  const DenseOperators op = dense_operators(h.matrix(), h.interpolation(), cap);
  const Index size = op.a.rows();
  const DenseMatrix eye = DenseMatrix::Identity(size, size);
  const auto m_lu = op.m.partialPivLu();
  const DenseMatrix g1 = eye - op.m.transpose().partialPivLu().solve(op.a);
  const DenseMatrix g2 = eye - m_lu.solve(op.a);
  const DenseMatrix ac = op.p.transpose() * op.a * op.p;
  const DenseMatrix t = eye - op.p * ac.llt().solve(op.p.transpose() * op.a);
  const DenseMatrix g2t = g2 * t;

  TwoGridIdentityReport r;
  r.E_norm_direct = a_norm_operator(g2t * g1, op.a);
  r.G2T_norm = a_norm_operator(g2t, op.a);
  r.square_residual = std::abs(r.E_norm_direct - r.G2T_norm * r.G2T_norm);

  const DenseMatrix sym = op.m + op.m.transpose() - op.a;
  Eigen::LLT<DenseMatrix> sym_llt(symmetric_part(sym));
  if (sym_llt.info() != Eigen::Success) throw NotSpdError("exact_E_norm: M + M' - A is singular", 0);
  // M~ is formed from the pre-smoother, which is M' here (G1 = I - M^-T A).
  const DenseMatrix mt = symmetric_part(op.m * sym_llt.solve(DenseMatrix(op.m.transpose())));
  const DenseMatrix proj = op.p * (op.p.transpose() * mt * op.p).llt().solve(op.p.transpose() * mt);
  const DenseMatrix comp = eye - proj;
  r.K = generalized_lambda_max(comp.transpose() * mt * comp, op.a);
  r.identity_residual = std::abs(r.E_norm_direct - (1.0 - 1.0 / r.K));
  return r;
}

std::string BoundChain::diagnostic() const {
  std::ostringstream os;
  os.precision(17);
  os << "rho_obs=" << rho_observed;
  if (e_norm) os << " ||E||_A=" << *e_norm;
  os << " kappa_exact=" << kappa_exact << " kappa_simplified=" << kappa_simplified;
  if (!rho_le_e) os << " [violated: rho_obs <= ||E||_A]";
  if (!e_le_kappa) os << " [violated: ||E||_A <= kappa_exact]";
  if (!rho_le_kappa) os << " [violated: rho_obs <= kappa_exact]";
  if (!kappa_le_simplified) os << " [violated: kappa_exact <= kappa_simplified]";
  return os.str();
}

BoundChain check_bound_ordering(double rho_observed, std::optional<double> e_norm, double kappa_exact,
                                double kappa_simplified, double slack) {
  BoundChain c;
  c.rho_observed = rho_observed;
  c.e_norm = e_norm;
  c.kappa_exact = kappa_exact;
  c.kappa_simplified = kappa_simplified;
  if (e_norm) {
    c.rho_le_e = rho_observed <= *e_norm + slack;
    c.e_le_kappa = *e_norm <= kappa_exact + slack;
  }
  c.rho_le_kappa = rho_observed <= kappa_exact + slack;
  c.kappa_le_simplified = kappa_exact <= kappa_simplified + slack;
  return c;
}

BoundChain check_bound_ordering(const Hierarchy& h, const BoundReport& report, std::size_t cap,
                                std::uint64_t seed) {
  const double rho = measure_convergence_factor(h, defaults::kRhoCycles, seed);
  std::optional<double> e;
  if (3 * h.n() <= cap) e = exact_E_norm(h, cap).E_norm_direct;
  return check_bound_ordering(rho, e, report.kappa_exact, report.kappa_simplified);
}

bool interpolation_constraint_holds(const ThreeTMatrix& m, const Interpolation& interp, double rel_tol) {
  for (Species s : {Species::Radiation, Species::Ion}) {
    const Vector& w = interp.weights(s);
    const Vector& d = m.exchange(s);
    Vector r = spmv(m.block(s), w);
    axpy(1.0, d, r);
    if (norm2(r) > rel_tol * norm2(d)) return false;
    for (double v : w) {
      if (!(v >= 0.0 && v < 1.0)) return false;
    }
  }
  return true;
}

bool VerifyReport::ok() const { return first_failure().empty(); }

std::string VerifyReport::first_failure() const {
  if (!validation.ok()) return "validation";
  if (!interpolation_ok) return "interpolation constraint";
  if (!bounds.identity.passed()) return "row-sum identity";
  if (smoothing && !(smoothing->passed && smoothing->h_lambda_max <= 4.0 + defaults::kChainSlack))
    return "smoothing property";
  if (approximation && !approximation->passed) return "approximation property";
  if (identity && !identity->passed()) return "two-grid identity";
  if (!chain.ok()) return "bound chain";
  return {};
}

VerifyReport verify_instance(const ThreeTMatrix& m, std::size_t cap, std::uint64_t seed) {
  VerifyReport r;
  r.validation = validate(m, cap);
  if (!r.validation.ok()) throw InvalidInstanceError("validation failed: " + r.validation.summary());
  const Hierarchy h(m);
  r.bounds = compute_bounds(h);
  r.interpolation_ok = interpolation_constraint_holds(m, h.interpolation());
  std::optional<double> e;
  if (3 * m.n <= cap) {
    r.smoothing = check_smoothing(m, cap);
    r.approximation = check_approximation(m, h.interpolation(), r.bounds.beta_exact, cap);
    r.identity = exact_E_norm(h, cap);
    e = r.identity->E_norm_direct;
  }
  r.chain = check_bound_ordering(measure_convergence_factor(h, defaults::kRhoCycles, seed), e,
                                 r.bounds.kappa_exact, r.bounds.kappa_simplified);
  return r;
}

nlohmann::json to_json(const SmoothingCheck& c) {
  return {{"lambda_min", c.lambda_min}, {"norm", c.norm},           {"alpha1", c.alpha1},
          {"alpha1_max", c.alpha1_max}, {"h_lambda_max", c.h_lambda_max}, {"passed", c.passed}};
}

nlohmann::json to_json(const ApproxCheck& c) {
  return {{"beta_used", c.beta_used}, {"lambda_min", c.lambda_min}, {"norm", c.norm}, {"passed", c.passed}};
}

nlohmann::json to_json(const TwoGridIdentityReport& r) {
  return {{"E_norm_direct", r.E_norm_direct},
          {"K", r.K},
          {"identity_residual", r.identity_residual},
          {"G2T_norm", r.G2T_norm},
          {"square_residual", r.square_residual},
          {"passed", r.passed()}};
}

nlohmann::json to_json(const BoundChain& c) {
  nlohmann::json j = {{"rho_observed", c.rho_observed},
                      {"kappa_exact", c.kappa_exact},
                      {"kappa_simplified", c.kappa_simplified},
                      {"ok", c.ok()}};
  j["E_norm"] = c.e_norm ? nlohmann::json(*c.e_norm) : nlohmann::json(nullptr);
  return j;
}

nlohmann::json to_json(const VerifyReport& r) {
  nlohmann::json j;
  j["validation"] = r.validation.summary();
  j["bounds"] = to_json(r.bounds);
  j["interpolation_ok"] = r.interpolation_ok;
  j["smoothing"] = r.smoothing ? to_json(*r.smoothing) : nlohmann::json(nullptr);
  j["approximation"] = r.approximation ? to_json(*r.approximation) : nlohmann::json(nullptr);
  j["two_grid_identity"] = r.identity ? to_json(*r.identity) : nlohmann::json(nullptr);
  j["bound_chain"] = to_json(r.chain);
  j["ok"] = r.ok();
  return j;
}

}  // namespace pctl
