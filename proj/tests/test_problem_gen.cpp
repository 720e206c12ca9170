#include <gtest/gtest.h>

#include <algorithm>

#include "pctl/bounds.hpp"
#include "support.hpp"

using namespace pctl;

TEST(GenFv, SingleCellIsReference) {
  FvProblemConfig c;
  c.grid = 1;
  c.dt = 1.0;
  c.rad_coupling = c.ion_coupling = 1.0;
  EXPECT_EQ(gen_fv(c), test::reference_instance());
}

TEST(GenFv, InteriorStencil) {
  FvProblemConfig c;
  c.grid = 16;
  const auto m = gen_fv(c);
  const double inv_h2 = 16.0 * 16.0;
  const std::size_t k = 5 * 16 + 7;
  const double kr = c.kappa_r(k), dr = c.rad_coupling(k);
  EXPECT_NEAR(m.radiation.at(k, k), c.cap_r(k) / c.dt + 4.0 * kr * inv_h2 + dr, 1e-9);
  for (std::size_t j : {k - 1, k + 1, k - 16, k + 16}) EXPECT_NEAR(m.radiation.at(k, j), -kr * inv_h2, 1e-12);
  EXPECT_EQ(m.radiation.row_cols(k).size(), 5u);
  EXPECT_DOUBLE_EQ(m.rad_exchange[k], -dr);
  EXPECT_NEAR(m.electron.at(k, k), c.cap_e(k) / c.dt + 4.0 * c.kappa_e(k) * inv_h2 + dr + c.ion_coupling(k), 1e-9);
  EXPECT_TRUE(validate(m).ok());
}

TEST(GenFv, HarmonicFaceCoefficient) {
  FvProblemConfig c;
  c.grid = 2;
  c.kappa_r = CellField(Vector{1.0, 3.0, 1.0, 1.0});
  const auto m = gen_fv(c);
  // face between cells 0 and 1: 2 * 1 * 3 / (1 + 3) = 1.5, times 1/h^2 = 4
  EXPECT_NEAR(m.radiation.at(0, 1), -6.0, 1e-12);
}

TEST(GenFv, DecoupledAndDirichlet) {
  FvProblemConfig c;
  c.grid = 6;
  c.rad_coupling = c.ion_coupling = 0.0;
  const auto r = validate(gen_fv(c));
  EXPECT_TRUE(r.ok());
  EXPECT_TRUE(r.decoupled);
  c.boundary = Boundary::Dirichlet;
  const auto m = gen_fv(c);
  // corner cell: two boundary faces add 2 kappa / h^2 each
  EXPECT_NEAR(m.radiation.at(0, 0), c.cap_r(0) / c.dt + 2.0 * 36.0 + 4.0 * 36.0 + c.rad_coupling(0), 1e-9);
}

TEST(GenFv, RejectsBadConfig) {
  FvProblemConfig c;
  c.cap_e = 0.0;
  EXPECT_THROW(gen_fv(c), InfeasibleError);
  c = FvProblemConfig{};
  c.dt = -1.0;
  EXPECT_THROW(gen_fv(c), InfeasibleError);
  c = FvProblemConfig{};
  c.ion_coupling = -1.0;
  EXPECT_THROW(gen_fv(c), InfeasibleError);
  c = FvProblemConfig{};
  c.kappa_i = CellField(Vector{1.0, 2.0});
  EXPECT_THROW(gen_fv(c), InfeasibleError);
}

TEST(GenFv, ZeroCouplingBetaIsMaxInverseTheta) {
  FvProblemConfig c;
  c.grid = 6;
  c.rad_coupling = c.ion_coupling = 0.0;
  const auto m = gen_fv(c);
  const auto p = dominance_profile(m);
  double expect = 0.0;
  for (std::size_t k = 0; k < m.n; ++k) expect = std::max({expect, 1.0 / p.theta_r[k], 1.0 / p.theta_i[k]});
  const auto b = compute_bounds(Hierarchy(m));
  EXPECT_NEAR(b.beta_exact, expect, 1e-12 * expect);
}

TEST(GenSynthetic, ProfileMatchesTargets) {
  SyntheticConfig c;
  c.theta_r = c.theta_i = c.theta_e = 0.8;
  c.delta_r = c.delta_i = 0.3;
  c.ratio_e = 2.0;
  c.weight_jitter = 0.4;
  c.seed = 11;
  const auto m = gen_synthetic(c);
  EXPECT_TRUE(validate(m).ok());
  const auto p = dominance_profile(m);
  for (std::size_t k = 0; k < m.n; ++k) {
    EXPECT_NEAR(p.theta_r[k], 0.8, 1e-12);
    EXPECT_NEAR(p.theta_e[k], 0.8, 1e-12);
    EXPECT_NEAR(p.delta_r[k], 0.3, 1e-12);
    EXPECT_NEAR(p.delta_i[k], 0.3, 1e-12);
    EXPECT_NEAR(p.delta_er[k], 0.15, 1e-12);
  }
}

TEST(GenSynthetic, EqualDiagonalsGiveEqualRatios) {
  SyntheticConfig c;
  c.theta_r = c.theta_i = c.theta_e = 0.9;
  c.delta_r = c.delta_i = 0.2;
  const auto m = gen_synthetic(c);
  const auto r = diagonal_ratios(m);
  for (std::size_t k = 0; k < m.n; ++k) {
    EXPECT_DOUBLE_EQ(r.rad_over_electron[k], 1.0);
    EXPECT_DOUBLE_EQ(r.ion_over_electron[k], 1.0);
  }
}

TEST(GenSynthetic, InfeasibleTargets) {
  SyntheticConfig c;
  c.delta_r = c.theta_r;
  try {
    (void)gen_synthetic(c);
    FAIL();
  } catch (const InfeasibleError& e) {
    EXPECT_NE(std::string(e.what()).find("infeasible coupling target"), std::string::npos);
  }
  c = SyntheticConfig{};
  c.theta_r = 1.0;
  c.delta_r = 0.0;
  try {
    (void)gen_synthetic(c);
    FAIL();
  } catch (const InfeasibleError& e) {
    EXPECT_NE(std::string(e.what()).find("infeasible dominance target"), std::string::npos);
  }
  // electron row: 0.45 + 0.45 >= 0.8 with equal ratios
  c = SyntheticConfig{};
  c.delta_r = c.delta_i = 0.45;
  EXPECT_THROW(gen_synthetic(c), InfeasibleError);
}

TEST(GenSynthetic, DeterministicInSeed) {
  SyntheticConfig c;
  c.weight_jitter = 0.5;
  c.seed = 3;
  EXPECT_EQ(gen_synthetic(c), gen_synthetic(c));
  auto d = c;
  d.seed = 4;
  EXPECT_NE(gen_synthetic(c), gen_synthetic(d));
}

TEST(RandomConfig, AlwaysFeasibleWithinRanges) {
  for (std::uint64_t s = 0; s < 300; ++s) {
    const auto c = random_synthetic_config(2 + s % 3, s);
    EXPECT_NO_THROW(c.check());
    for (double t : {c.theta_r, c.theta_i, c.theta_e}) {
      EXPECT_GE(t, 0.3);
      EXPECT_LT(t, 1.0);
    }
    EXPECT_LT(c.delta_r, 0.9 * c.theta_r);
    EXPECT_LT(c.delta_i, 0.9 * c.theta_i);
    EXPECT_LT(c.induced_delta_er() + c.induced_delta_ei(), 0.9 * c.theta_e);
  }
}

TEST(ConfigJson, ShorthandsAndUnknownKeys) {
  const auto c = synthetic_config_from_json(
      {{"kind", "synthetic"}, {"theta", 0.7}, {"delta", 0.2}, {"diag_ratios", {1, 2, 4}}, {"n_grid", 3}});
  EXPECT_DOUBLE_EQ(c.theta_e, 0.7);
  EXPECT_DOUBLE_EQ(c.delta_i, 0.2);
  EXPECT_DOUBLE_EQ(c.ratio_i, 2.0);
  EXPECT_EQ(c.n_grid, 3u);
  EXPECT_THROW(synthetic_config_from_json({{"thetta", 0.7}}), InfeasibleError);
  EXPECT_THROW(fv_config_from_json({{"grid", 4}, {"kapa_r", 1}}), InfeasibleError);
  const auto f = fv_config_from_json({{"kind", "fv"}, {"grid", 4}, {"kappa_r", {1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 2}}});
  EXPECT_EQ(f.grid, 4u);
  EXPECT_DOUBLE_EQ(f.kappa_r(15), 2.0);
  EXPECT_EQ(gen_fv(fv_config_from_json(to_json(f))), gen_fv(f));
  EXPECT_EQ(gen_synthetic(synthetic_config_from_json(to_json(c))), gen_synthetic(c));
}
