#include "pctl/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "pctl/manifest.hpp"
#include "pctl/problem_gen.hpp"
#include "pctl/verify.hpp"

namespace pctl::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Globals {
  std::uint64_t seed = 0;
  bool quiet = false;
  std::string out;
};

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw IoError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot write " + path.string());
  f << text;
  if (!f) throw IoError("write failed for " + path.string());
}

// ---------------------------------------------------------------------------
// generate

int cmd_generate(const Globals& g, const std::string& config_path, std::string manifest_path, std::ostream& out) {
  if (manifest_path.empty()) manifest_path = g.out;
  if (manifest_path.empty()) throw Error("generate: no output manifest given (positional or --out)");
  const json cfg = read_json(config_path);
  const std::string kind = cfg.value("kind", "");
  ThreeTMatrix m;
  json meta;
  if (kind == "fv") {
    const auto c = fv_config_from_json(cfg);
    m = gen_fv(c);
    meta = to_json(c);
  } else if (kind == "synthetic") {
    const auto c = synthetic_config_from_json(cfg);
    m = gen_synthetic(c);
    meta = to_json(c);
  } else {
    throw InfeasibleError("generate: config 'kind' must be \"fv\" or \"synthetic\"");
  }
  const auto report = validate(m);
  write_manifest(m, manifest_path, meta);
  if (!g.quiet) out << "wrote " << manifest_path << " (n = " << m.n << ")\n" << report.summary();
  return report.ok() ? kOk : kInvalid;
}

// ---------------------------------------------------------------------------
// solve

Vector make_rhs(const std::string& spec, std::size_t size) {
  if (spec == "ones") return Vector(size, 1.0);
  if (spec.rfind("random:", 0) == 0) {
    std::uint64_t seed = 0;
    try {
      seed = std::stoull(spec.substr(7));
    } catch (const std::exception&) {
      throw InfeasibleError("solve: bad --rhs seed in '" + spec + "'");
    }
    SplitMix64 rng(seed);
    Vector b(size);
    for (double& v : b) v = rng.uniform(-1.0, 1.0);
    return b;
  }
  Vector b = read_vector(spec);
  if (b.size() != size) throw DimensionError("solve: right-hand side has length " + std::to_string(b.size()) +
                                             ", expected " + std::to_string(size));
  return b;
}

int cmd_solve(const Globals& g, const std::string& manifest, double eps, std::size_t maxit, const std::string& method,
              const std::string& rhs, const std::string& stats_path, std::ostream& out) {
  const Manifest mf = read_manifest(manifest);
  const auto report = validate(mf.matrix);
  if (!report.ok()) throw InvalidInstanceError("instance failed validation:\n" + report.summary());
  const Vector b = make_rhs(rhs, 3 * mf.matrix.n);

  SolveResult res;
  if (method == "cg") {
    res = cg_solve(assemble_full(mf.matrix), b, eps, maxit);
  } else {
    const Hierarchy h(mf.matrix);
    if (method == "pctl") res = solve_stationary(h, b, Vector(b.size(), 0.0), eps, maxit);
    else res = pcg_pctl(h, b, eps, maxit);
  }
  const auto& st = res.stats;
  if (!stats_path.empty()) {
    const json j = {{"method", method},          {"n", mf.matrix.n},
                    {"iters", st.iters},         {"converged", st.converged},
                    {"rho_observed", st.rho_observed}, {"residuals", st.residuals}};
    write_text(stats_path, j.dump(2) + "\n");
  }
  if (!g.out.empty()) write_vector(res.x, g.out);
  if (!g.quiet) {
    out << "method " << method << ": iters " << st.iters << ", relative residual " << format_real(st.residuals.back())
        << ", rho " << format_real(st.rho_observed) << (st.converged ? "" : " (not converged)") << '\n';
  }
  return st.converged ? kOk : kNotConverged;
}

// ---------------------------------------------------------------------------
// bound

int cmd_bound(const Globals& g, const std::string& manifest, std::ostream& out) {
  const Manifest mf = read_manifest(manifest);
  const auto report = validate(mf.matrix);
  if (!report.ok()) throw InvalidInstanceError("instance failed validation:\n" + report.summary());
  const BoundReport b = compute_bounds(Hierarchy(mf.matrix));
  if (!g.out.empty()) write_text(g.out, to_json(b).dump(2) + "\n");
  if (!g.quiet) {
    out << "beta_exact       " << format_real(b.beta_exact) << '\n'
        << "beta_simplified  " << format_real(b.beta_simplified) << '\n'
        << "kappa_exact      " << format_real(b.kappa_exact) << '\n'
        << "kappa_simplified " << format_real(b.kappa_simplified) << '\n';
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// verify

void print_row(std::ostream& out, const std::string& name, bool pass, const std::string& detail) {
  out << "  " << std::left << std::setw(26) << name << (pass ? "PASS" : "FAIL") << "  " << detail << '\n';
}

std::string kv(const char* key, double v) { return std::string(key) + "=" + format_real(v); }

void print_table(std::ostream& out, const VerifyReport& r) {
  print_row(out, "validation", r.validation.ok(), "");
  print_row(out, "interpolation constraint", r.interpolation_ok, "");
  print_row(out, "row-sum identity", r.bounds.identity.passed(), kv("max_disagreement", r.bounds.identity.max_disagreement));
  if (r.smoothing) {
    const auto& s = *r.smoothing;
    print_row(out, "smoothing property", s.passed && s.h_lambda_max <= 4.0 + defaults::kChainSlack,
              kv("lambda_min", s.lambda_min) + " " + kv("lambda_max_H", s.h_lambda_max));
  }
  if (r.approximation) {
    print_row(out, "approximation property", r.approximation->passed,
              kv("beta", r.approximation->beta_used) + " " + kv("lambda_min_Q", r.approximation->lambda_min));
  }
  if (r.identity) {
    print_row(out, "two-grid identity", r.identity->passed(),
              kv("E_norm", r.identity->E_norm_direct) + " " + kv("K", r.identity->K));
  }
  print_row(out, "bound chain", r.chain.ok(), r.chain.diagnostic());
}

int cmd_verify(const Globals& g, const std::string& manifest, const std::vector<std::uint64_t>& random,
               std::size_t cap, std::ostream& out, std::ostream& err) {
  std::vector<std::pair<std::string, ThreeTMatrix>> instances;
  if (!manifest.empty()) {
    instances.emplace_back(manifest, read_manifest(manifest).matrix);
  }
  if (!random.empty()) {
    SplitMix64 rng(random[2]);
    for (std::uint64_t k = 0; k < random[1]; ++k) {
      const auto cfg = random_synthetic_config(random[0], rng.next());
      instances.emplace_back("random " + std::to_string(k + 1), gen_synthetic(cfg));
    }
  }
  if (instances.empty()) throw Error("verify: give a manifest or --random NGRID COUNT SEED");

  json reports = json::array();
  std::string failure;
  for (const auto& [name, m] : instances) {
    const auto report = validate(m, cap);
    if (!report.ok()) throw InvalidInstanceError(name + ": instance failed validation:\n" + report.summary());
    const VerifyReport r = verify_instance(m, cap, g.seed);
    if (!g.quiet) {
      out << name << " (n = " << m.n << ")\n";
      print_table(out, r);
    }
    reports.push_back(to_json(r));
    if (failure.empty() && !r.ok()) failure = name + ": " + r.first_failure();
  }
  if (!g.out.empty()) write_text(g.out, reports.dump(2) + "\n");
  if (!failure.empty()) {
    err << "verification failed: " << failure << '\n';
    return kVerifyFailed;
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// sweep

Vector read_grid(const json& v, const char* what) {
  Vector out;
  if (v.is_array()) {
    out = v.get<Vector>();
  } else if (v.is_object()) {
    const double from = v.at("from").get<double>(), to = v.at("to").get<double>(), step = v.at("step").get<double>();
    if (!(step > 0.0) || to < from) throw InfeasibleError(std::string("sweep: bad range for ") + what);
    const auto count = static_cast<std::size_t>(std::llround((to - from) / step)) + 1;
    for (std::size_t k = 0; k < count; ++k) out.push_back(from + static_cast<double>(k) * step);
  } else {
    throw InfeasibleError(std::string("sweep: ") + what + " must be a list or {from, to, step}");
  }
  if (out.empty()) throw InfeasibleError(std::string("sweep: empty ") + what + " grid");
  return out;
}

int cmd_sweep(const Globals& g, const std::string& spec_path, std::ostream& out, std::ostream& err) {
  const json spec = read_json(spec_path);
  for (const auto& [key, _] : spec.items()) {
    static const std::set<std::string> known = {"mode",    "theta", "delta",       "delta_fraction", "n_grid",
                                                "seed",    "output", "diag_ratios", "weight_jitter"};
    if (!known.count(key)) throw InfeasibleError("sweep: unknown field '" + key + "'");
  }
  const std::string mode = spec.value("mode", "analytic");
  if (mode != "analytic" && mode != "synthetic") throw InfeasibleError("sweep: mode must be analytic or synthetic");
  if (!spec.contains("theta")) throw InfeasibleError("sweep: missing theta grid");
  const Vector thetas = read_grid(spec["theta"], "theta");
  const bool fractions = spec.contains("delta_fraction");
  if (fractions == spec.contains("delta")) throw InfeasibleError("sweep: give exactly one of delta, delta_fraction");
  const Vector deltas = read_grid(fractions ? spec["delta_fraction"] : spec["delta"], "delta");
  const std::uint64_t seed = spec.value("seed", g.seed);

  std::ostringstream csv;
  std::size_t skipped = 0;
  if (mode == "analytic") {
    csv << "theta,delta,kappa_analytic,active_branch,status\n";
    for (double theta : thetas) {
      for (double dv : deltas) {
        const double delta = fractions ? dv * theta : dv;
        csv << format_real(theta) << ',' << format_real(delta) << ',';
        try {
          const auto k = example_kappa(theta, delta);
          csv << format_real(k.kappa) << ',' << to_string(k.branch) << ",ok\n";
        } catch (const InfeasibleError&) {
          csv << ",,infeasible\n";
          ++skipped;
        }
      }
    }
  } else {
    SyntheticConfig base;
    base.n_grid = spec.value("n_grid", std::size_t{4});
    const Vector ratios = spec.value("diag_ratios", Vector{1.0, 1.0, 2.0});
    if (ratios.size() != 3) throw InfeasibleError("sweep: diag_ratios needs three values [r, i, e]");
    base.ratio_r = ratios[0];
    base.ratio_i = ratios[1];
    base.ratio_e = ratios[2];
    base.weight_jitter = spec.value("weight_jitter", 0.0);
    base.seed = seed;
    csv << "theta,delta,n,beta_exact,beta_simplified,kappa_exact,kappa_simplified,rho_observed,status\n";
    for (double theta : thetas) {
      for (double dv : deltas) {
        SyntheticConfig c = base;
        const double delta = fractions ? dv * theta : dv;
        c.theta_r = c.theta_i = c.theta_e = theta;
        c.delta_r = c.delta_i = delta;
        csv << format_real(theta) << ',' << format_real(delta) << ',';
        try {
          const Hierarchy h(gen_synthetic(c));
          const BoundReport b = compute_bounds(h);
          const double rho = measure_convergence_factor(h, defaults::kRhoCycles, seed);
          csv << h.n() << ',' << format_real(b.beta_exact) << ',' << format_real(b.beta_simplified) << ','
              << format_real(b.kappa_exact) << ',' << format_real(b.kappa_simplified) << ',' << format_real(rho)
              << ",ok\n";
        } catch (const InfeasibleError&) {
          csv << ",,,,,,infeasible\n";
          ++skipped;
        } catch (const InvalidInstanceError&) {
          csv << ",,,,,,invalid\n";
          ++skipped;
        }
      }
    }
  }
  std::string path = g.out.empty() ? spec.value("output", "") : g.out;
  if (path.empty()) {
    out << csv.str();
  } else {
    write_text(path, csv.str());
    if (!g.quiet) out << "wrote " << path << '\n';
  }
  if (skipped && !g.quiet) err << "warning: " << skipped << " grid point(s) infeasible, recorded in the status column\n";
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Two-level solver and convergence bounds for three-temperature block systems", "pctl"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Seed for random right-hand sides and convergence measurements");
  app.add_flag("--quiet", g.quiet, "Suppress informational output");
  app.add_option("--out", g.out, "Output path (manifest, report, solution or CSV)");

  std::string config, manifest_out;
  auto* gen = app.add_subcommand("generate", "Generate a 3T instance from a JSON config");
  gen->add_option("config", config, "Generator config (kind: fv or synthetic)")->required();
  gen->add_option("manifest", manifest_out, "Output manifest path");

  std::string manifest, method = "pctl", rhs = "ones", stats;
  double eps = 1e-10;
  std::size_t maxit = 500;
  auto* solve = app.add_subcommand("solve", "Solve A x = b");
  solve->add_option("manifest", manifest)->required();
  solve->add_option("--eps", eps, "Relative residual tolerance")->capture_default_str();
  solve->add_option("--maxit", maxit)->capture_default_str();
  solve->add_option("--method", method)->check(CLI::IsMember({"pctl", "pcg-pctl", "cg"}))->capture_default_str();
  solve->add_option("--rhs", rhs, "ones, random:SEED or a vector file")->capture_default_str();
  solve->add_option("--stats", stats, "Write solve statistics JSON");

  auto* bound = app.add_subcommand("bound", "Compute convergence bounds");
  bound->add_option("manifest", manifest)->required();

  std::vector<std::uint64_t> random;
  std::size_t cap = defaults::kDenseCap;
  auto* verify = app.add_subcommand("verify", "Run the dense verification oracles");
  verify->add_option("manifest", manifest);
  verify->add_option("--random", random, "NGRID COUNT SEED")->expected(3);
  verify->add_option("--cap", cap, "Dense dimension cap")->capture_default_str();

  std::string sweep_spec;
  auto* sweep = app.add_subcommand("sweep", "Parameter sweep to CSV");
  sweep->add_option("spec", sweep_spec, "Sweep spec JSON")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInvalid;
  }

  try {
    if (*gen) return cmd_generate(g, config, manifest_out, out);
    if (*solve) return cmd_solve(g, manifest, eps, maxit, method, rhs, stats, out);
    if (*bound) return cmd_bound(g, manifest, out);
    if (*verify) return cmd_verify(g, manifest, random, cap, out, err);
    if (*sweep) return cmd_sweep(g, sweep_spec, out, err);
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInvalid;
  }
  return kInvalid;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace pctl::cli
