#pragma once

#include <filesystem>
#include <string>

#include "pctl/problem_gen.hpp"
#include "pctl/threet.hpp"

namespace pctl::test {

/// A_r = A_i = [2], A_e = [3], d_r = d_i = -1.
inline ThreeTMatrix scalar_instance(double ar = 2.0, double ai = 2.0, double ae = 3.0, double dr = -1.0,
                                    double di = -1.0) {
  ThreeTMatrix m;
  m.n = 1;
  m.radiation = SparseSym::diagonal(Vector{ar});
  m.ion = SparseSym::diagonal(Vector{ai});
  m.electron = SparseSym::diagonal(Vector{ae});
  m.rad_exchange = {dr};
  m.ion_exchange = {di};
  return m;
}

inline ThreeTMatrix reference_instance() { return scalar_instance(); }

/// d = 0, every block the identity.
inline ThreeTMatrix decoupled_identity(std::size_t n) {
  ThreeTMatrix m;
  m.n = n;
  m.radiation = m.ion = m.electron = SparseSym::identity(n);
  m.rad_exchange.assign(n, 0.0);
  m.ion_exchange.assign(n, 0.0);
  return m;
}

/// Random valid 1x1 blocks.
inline ThreeTMatrix random_scalar_instance(std::uint64_t seed) {
  SplitMix64 rng(seed);
  const double dr = -rng.uniform(0.0, 2.0), di = -rng.uniform(0.0, 2.0);
  const double ar = -dr + rng.uniform(0.1, 2.0), ai = -di + rng.uniform(0.1, 2.0);
  const double ae = -dr - di + rng.uniform(0.1, 2.0);
  return scalar_instance(ar, ai, ae, dr, di);
}

inline ThreeTMatrix random_synthetic(std::size_t n_grid, std::uint64_t seed) {
  return gen_synthetic(random_synthetic_config(n_grid, seed));
}

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("pctl_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace pctl::test
