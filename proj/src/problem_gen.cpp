#include "pctl/problem_gen.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace pctl {

std::uint64_t SplitMix64::next() {
  std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double SplitMix64::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

// ---------------------------------------------------------------------------
// Finite volume generator

void FvProblemConfig::check() const {
  if (grid == 0) throw InfeasibleError("fv: grid must be >= 1");
  if (!(dt > 0.0)) throw InfeasibleError("fv: dt must be positive");
  const std::size_t cells = grid * grid;
  auto field = [&](const CellField& f, const char* name, bool positive) {
    if (!f.is_uniform() && f.size() != cells) {
      throw InfeasibleError(std::string("fv: field '") + name + "' has " + std::to_string(f.size()) +
                            " values, expected " + std::to_string(cells));
    }
    for (std::size_t c = 0; c < cells; ++c) {
      const double v = f(c);
      if (positive ? !(v > 0.0) : !(v >= 0.0)) {
        throw InfeasibleError(std::string("fv: field '") + name + (positive ? "' must be > 0" : "' must be >= 0") +
                              " (cell " + std::to_string(c + 1) + ")");
      }
    }
  };
  field(cap_r, "cap_r", true);
  field(cap_i, "cap_i", true);
  field(cap_e, "cap_e", true);
  field(kappa_r, "kappa_r", false);
  field(kappa_i, "kappa_i", false);
  field(kappa_e, "kappa_e", false);
  field(rad_coupling, "rad_coupling", false);
  field(ion_coupling, "ion_coupling", false);
}

namespace {

double harmonic(double a, double b) { return (a + b) > 0.0 ? 2.0 * a * b / (a + b) : 0.0; }

/// (capacity/dt) I + flux stencil + extra diagonal.
SparseSym fv_block(const FvProblemConfig& c, const CellField& cap, const CellField& kappa,
                   const std::function<double(std::size_t)>& extra_diag) {
  const std::size_t n_side = c.grid;
  const double inv_h2 = static_cast<double>(n_side * n_side);
  std::vector<Triplet> t;
  t.reserve(5 * n_side * n_side);
  for (std::size_t y = 0; y < n_side; ++y) {
    for (std::size_t x = 0; x < n_side; ++x) {
      const std::size_t k = y * n_side + x;
      double diag = cap(k) / c.dt + extra_diag(k);
      auto face = [&](bool inside, std::size_t nb) {
        if (inside) {
          const double tf = harmonic(kappa(k), kappa(nb)) * inv_h2;
          diag += tf;
          if (tf != 0.0) t.push_back({k, nb, -tf});
        } else if (c.boundary == Boundary::Dirichlet) {
          diag += 2.0 * kappa(k) * inv_h2;
        }
      };
      face(x > 0, k - 1);
      face(x + 1 < n_side, k + 1);
      face(y > 0, k - n_side);
      face(y + 1 < n_side, k + n_side);
      t.push_back({k, k, diag});
    }
  }
  return SparseSym::from_triplets(n_side * n_side, t);
}

void require_valid(const ThreeTMatrix& m, const char* who) {
  const auto report = validate(m);
  if (!report.ok()) {
    throw InvalidInstanceError(std::string(who) + ": generated instance failed validation\n" + report.summary());
  }
}

}  // namespace

ThreeTMatrix gen_fv(const FvProblemConfig& config) {
  config.check();
  const std::size_t n = config.grid * config.grid;
  ThreeTMatrix m;
  m.n = n;
  m.rad_exchange.resize(n);
  m.ion_exchange.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    m.rad_exchange[k] = -config.rad_coupling(k);
    m.ion_exchange[k] = -config.ion_coupling(k);
  }
  m.radiation = fv_block(config, config.cap_r, config.kappa_r,
                         [&](std::size_t k) { return config.rad_coupling(k); });
  m.ion = fv_block(config, config.cap_i, config.kappa_i, [&](std::size_t k) { return config.ion_coupling(k); });
  m.electron = fv_block(config, config.cap_e, config.kappa_e,
                        [&](std::size_t k) { return config.rad_coupling(k) + config.ion_coupling(k); });
  require_valid(m, "gen_fv");
  return m;
}

// ---------------------------------------------------------------------------
// Synthetic generator

void SyntheticConfig::check() const {
  auto fail = [](const std::string& what) { throw InfeasibleError(what); };
  if (n_grid < 2) fail("infeasible dominance target: n_grid must be >= 2");
  for (double t : {theta_r, theta_i, theta_e}) {
    // theta = 1 would zero the grid couplings; the Laplacian template needs them.
    if (!(t > 0.0 && t < 1.0)) {
      std::ostringstream os;
      os << "infeasible dominance target: theta = " << t << " must lie in (0, 1)";
      fail(os.str());
    }
  }
  if (!(ratio_r > 0.0 && ratio_i > 0.0 && ratio_e > 0.0)) fail("infeasible dominance target: diagonal ratios must be > 0");
  if (!(weight_jitter >= 0.0 && weight_jitter < 1.0)) fail("infeasible dominance target: weight_jitter must lie in [0, 1)");
  std::ostringstream os;
  if (!(delta_r >= 0.0 && delta_i >= 0.0)) {
    os << "infeasible coupling target: delta must be >= 0";
    fail(os.str());
  }
  if (!(delta_r < theta_r) || !(delta_i < theta_i)) {
    os << "infeasible coupling target: need delta_r < theta_r and delta_i < theta_i (got delta_r = " << delta_r
       << ", theta_r = " << theta_r << ", delta_i = " << delta_i << ", theta_i = " << theta_i << ")";
    fail(os.str());
  }
  if (!(induced_delta_er() + induced_delta_ei() < theta_e)) {
    os << "infeasible coupling target: induced electron-row coupling " << induced_delta_er() + induced_delta_ei()
       << " must be < theta_e = " << theta_e;
    fail(os.str());
  }
}

ThreeTMatrix gen_synthetic(const SyntheticConfig& config) {
  config.check();
  const std::size_t side = config.n_grid;
  const std::size_t n = side * side;

  struct Edge {
    std::size_t a, b;
    double w;
  };
  std::vector<Edge> edges;
  SplitMix64 rng(config.seed);
  for (std::size_t y = 0; y < side; ++y) {
    for (std::size_t x = 0; x < side; ++x) {
      const std::size_t k = y * side + x;
      if (x + 1 < side) edges.push_back({k, k + 1, 1.0 + config.weight_jitter * (2.0 * rng.uniform() - 1.0)});
      if (y + 1 < side) edges.push_back({k, k + side, 1.0 + config.weight_jitter * (2.0 * rng.uniform() - 1.0)});
    }
  }
  Vector weight_sum(n, 0.0);
  for (const auto& e : edges) {
    weight_sum[e.a] += e.w;
    weight_sum[e.b] += e.w;
  }

  auto block = [&](double theta, double ratio) {
    std::vector<Triplet> t;
    const double off = (1.0 - theta) * ratio;
    for (const auto& e : edges) {
      t.push_back({e.a, e.b, -off * e.w});
      t.push_back({e.b, e.a, -off * e.w});
    }
    for (std::size_t k = 0; k < n; ++k) t.push_back({k, k, ratio * weight_sum[k]});
    return SparseSym::from_triplets(n, t);
  };

  ThreeTMatrix m;
  m.n = n;
  m.radiation = block(config.theta_r, config.ratio_r);
  m.ion = block(config.theta_i, config.ratio_i);
  m.electron = block(config.theta_e, config.ratio_e);
  m.rad_exchange.resize(n);
  m.ion_exchange.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    m.rad_exchange[k] = -config.delta_r * config.ratio_r * weight_sum[k];
    m.ion_exchange[k] = -config.delta_i * config.ratio_i * weight_sum[k];
  }
  require_valid(m, "gen_synthetic");
  return m;
}

SyntheticConfig random_synthetic_config(std::size_t n_grid, std::uint64_t seed) {
  SplitMix64 rng(seed);
  SyntheticConfig c;
  c.n_grid = n_grid;
  c.theta_r = rng.uniform(0.3, 1.0);
  c.theta_i = rng.uniform(0.3, 1.0);
  c.theta_e = rng.uniform(0.3, 1.0);
  c.delta_r = rng.uniform(0.0, 0.9 * c.theta_r);
  c.delta_i = rng.uniform(0.0, 0.9 * c.theta_i);
  c.ratio_r = rng.uniform(0.5, 2.0);
  c.ratio_i = rng.uniform(0.5, 2.0);
  const double needed = (c.delta_r * c.ratio_r + c.delta_i * c.ratio_i) / (0.9 * c.theta_e);
  c.ratio_e = std::max(rng.uniform(0.5, 2.0), needed * 1.01);
  c.weight_jitter = rng.uniform(0.0, 0.5);
  c.seed = rng.next();
  return c;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

void reject_unknown(const nlohmann::json& j, const std::set<std::string>& known, const char* what) {
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) throw InfeasibleError(std::string(what) + ": unknown field '" + key + "'");
  }
}

CellField field_from_json(const nlohmann::json& v) {
  if (v.is_number()) return CellField(v.get<double>());
  if (v.is_array()) return CellField(v.get<Vector>());
  throw InfeasibleError("fv: field must be a number or an array of per-cell values");
}

nlohmann::json field_to_json(const CellField& f, std::size_t cells) {
  if (f.is_uniform()) return f(0);
  Vector v(cells);
  for (std::size_t c = 0; c < cells; ++c) v[c] = f(c);
  return v;
}

}  // namespace

FvProblemConfig fv_config_from_json(const nlohmann::json& j) {
  reject_unknown(j,
                 {"kind", "grid", "dt", "boundary", "kappa_r", "kappa_i", "kappa_e", "rad_coupling", "ion_coupling",
                  "cap_r", "cap_i", "cap_e", "meta"},
                 "fv config");
  FvProblemConfig c;
  try {
    if (j.contains("grid")) c.grid = j["grid"].get<std::size_t>();
    if (j.contains("dt")) c.dt = j["dt"].get<double>();
    if (j.contains("boundary")) {
      const auto b = j["boundary"].get<std::string>();
      if (b == "neumann") c.boundary = Boundary::Neumann;
      else if (b == "dirichlet") c.boundary = Boundary::Dirichlet;
      else throw InfeasibleError("fv config: boundary must be 'neumann' or 'dirichlet'");
    }
    auto set = [&](const char* key, CellField& f) {
      if (j.contains(key)) f = field_from_json(j[key]);
    };
    set("kappa_r", c.kappa_r);
    set("kappa_i", c.kappa_i);
    set("kappa_e", c.kappa_e);
    set("rad_coupling", c.rad_coupling);
    set("ion_coupling", c.ion_coupling);
    set("cap_r", c.cap_r);
    set("cap_i", c.cap_i);
    set("cap_e", c.cap_e);
  } catch (const nlohmann::json::exception& e) {
    throw InfeasibleError(std::string("fv config: ") + e.what());
  }
  return c;
}

SyntheticConfig synthetic_config_from_json(const nlohmann::json& j) {
  reject_unknown(j,
                 {"kind", "n_grid", "theta", "theta_r", "theta_i", "theta_e", "delta", "delta_r", "delta_i",
                  "diag_ratios", "weight_jitter", "seed", "meta"},
                 "synthetic config");
  SyntheticConfig c;
  try {
    if (j.contains("n_grid")) c.n_grid = j["n_grid"].get<std::size_t>();
    if (j.contains("theta")) c.theta_r = c.theta_i = c.theta_e = j["theta"].get<double>();
    if (j.contains("theta_r")) c.theta_r = j["theta_r"].get<double>();
    if (j.contains("theta_i")) c.theta_i = j["theta_i"].get<double>();
    if (j.contains("theta_e")) c.theta_e = j["theta_e"].get<double>();
    if (j.contains("delta")) c.delta_r = c.delta_i = j["delta"].get<double>();
    if (j.contains("delta_r")) c.delta_r = j["delta_r"].get<double>();
    if (j.contains("delta_i")) c.delta_i = j["delta_i"].get<double>();
    if (j.contains("diag_ratios")) {
      const auto r = j["diag_ratios"].get<Vector>();
      if (r.size() != 3) throw InfeasibleError("synthetic config: diag_ratios needs three values [r, i, e]");
      c.ratio_r = r[0];
      c.ratio_i = r[1];
      c.ratio_e = r[2];
    }
    if (j.contains("weight_jitter")) c.weight_jitter = j["weight_jitter"].get<double>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw InfeasibleError(std::string("synthetic config: ") + e.what());
  }
  return c;
}

nlohmann::json to_json(const SyntheticConfig& c) {
  return {{"kind", "synthetic"},
          {"n_grid", c.n_grid},
          {"theta_r", c.theta_r},
          {"theta_i", c.theta_i},
          {"theta_e", c.theta_e},
          {"delta_r", c.delta_r},
          {"delta_i", c.delta_i},
          {"diag_ratios", {c.ratio_r, c.ratio_i, c.ratio_e}},
          {"weight_jitter", c.weight_jitter},
          {"seed", c.seed}};
}

nlohmann::json to_json(const FvProblemConfig& c) {
  const std::size_t cells = c.grid * c.grid;
  return {{"kind", "fv"},
          {"grid", c.grid},
          {"dt", c.dt},
          {"boundary", c.boundary == Boundary::Neumann ? "neumann" : "dirichlet"},
          {"kappa_r", field_to_json(c.kappa_r, cells)},
          {"kappa_i", field_to_json(c.kappa_i, cells)},
          {"kappa_e", field_to_json(c.kappa_e, cells)},
          {"rad_coupling", field_to_json(c.rad_coupling, cells)},
          {"ion_coupling", field_to_json(c.ion_coupling, cells)},
          {"cap_r", field_to_json(c.cap_r, cells)},
          {"cap_i", field_to_json(c.cap_i, cells)},
          {"cap_e", field_to_json(c.cap_e, cells)}};
}

}  // namespace pctl
