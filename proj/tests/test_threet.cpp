#include <gtest/gtest.h>

#include <fstream>

#include "pctl/dense.hpp"
#include "pctl/manifest.hpp"
#include "support.hpp"

using namespace pctl;

TEST(Validate, ReferencePasses) {
  const auto r = validate(test::reference_instance());
  EXPECT_TRUE(r.ok()) << r.summary();
  EXPECT_FALSE(r.decoupled);
}

TEST(Validate, StrongCouplingBreaksDominance) {
  // d_r = -2: row 3 has 3 against 2 + 1; row 1 has 2 against 2
  const auto r = validate(test::scalar_instance(2.0, 2.0, 3.0, -2.0, -1.0));
  EXPECT_FALSE(r.ok());
  const auto* dom = r.find("diagonal_dominance");
  ASSERT_NE(dom, nullptr);
  EXPECT_FALSE(dom->passed);
  EXPECT_NE(std::find(dom->offending.begin(), dom->offending.end(), 3u), dom->offending.end());
}

TEST(Validate, DecoupledNote) {
  const auto r = validate(test::decoupled_identity(3));
  EXPECT_TRUE(r.ok()) << r.summary();
  EXPECT_TRUE(r.decoupled);
}

TEST(Validate, PositiveOffDiagonalFailsSignPattern) {
  auto m = test::random_synthetic(2, 4);
  std::vector<Triplet> t = m.radiation.lower_triplets();
  for (auto& e : t)
    if (e.row != e.col) e.value = std::abs(e.value);
  m.radiation = SparseSym::from_lower(m.n, t);
  const auto r = validate(m);
  EXPECT_FALSE(r.ok());
  EXPECT_FALSE(r.find("m_matrix_sign")->passed);
}

TEST(Validate, PositiveCouplingFails) {
  const auto r = validate(test::scalar_instance(2.0, 2.0, 3.0, 0.5, -1.0));
  EXPECT_FALSE(r.find("coupling_sign")->passed);
}

TEST(Validate, RandomSyntheticInstancesPass) {
  for (std::uint64_t s = 0; s < 30; ++s) {
    const auto r = validate(test::random_synthetic(2 + s % 3, s));
    EXPECT_TRUE(r.ok()) << r.summary();
  }
}

TEST(Assemble, ReferenceDense) {
  const auto full = to_dense(assemble_full(test::reference_instance()));
  Eigen::Matrix3d expect;
  expect << 2, 0, -1, 0, 2, -1, -1, -1, 3;
  EXPECT_EQ(Eigen::MatrixXd(expect), full);
}

TEST(Assemble, DecoupledIsBlockDiagonal) {
  const auto full = assemble_full(test::decoupled_identity(4));
  EXPECT_EQ(full, SparseSym::identity(12));
}

TEST(Assemble, SplitRoundTrip) {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto m = test::random_synthetic(3, s);
    EXPECT_EQ(split_full(assemble_full(m), m.n), m);
  }
  EXPECT_THROW(split_full(SparseSym::identity(7), 2), DimensionError);
}

TEST(Assemble, DimensionMismatch) {
  auto m = test::reference_instance();
  m.ion_exchange.push_back(0.0);
  EXPECT_THROW(assemble_full(m), DimensionError);
}

TEST(Profile, Reference) {
  const auto p = dominance_profile(test::reference_instance());
  EXPECT_DOUBLE_EQ(p.theta_r[0], 1.0);
  EXPECT_DOUBLE_EQ(p.theta_i[0], 1.0);
  EXPECT_DOUBLE_EQ(p.theta_e[0], 1.0);
  EXPECT_DOUBLE_EQ(p.delta_r[0], 0.5);
  EXPECT_DOUBLE_EQ(p.delta_i[0], 0.5);
  EXPECT_DOUBLE_EQ(p.delta_er[0], 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(p.delta_ei[0], 1.0 / 3.0);
  EXPECT_EQ(p.row_sums, (Vector{1, 1, 1}));
}

TEST(Profile, DecoupledHasZeroDelta) {
  const auto p = dominance_profile(test::decoupled_identity(3));
  for (const Vector* v : {&p.delta_r, &p.delta_i, &p.delta_er, &p.delta_ei})
    for (double x : *v) EXPECT_EQ(x, 0.0);
}

TEST(Profile, RowSumsEqualDiagonalTimesThetaMinusDelta) {
  const auto m = test::random_synthetic(4, 17);
  const auto p = dominance_profile(m);
  const Vector ar = m.radiation.diag();
  for (std::size_t k = 0; k < m.n; ++k) EXPECT_NEAR(p.row_sums[k], ar[k] * (p.theta_r[k] - p.delta_r[k]), 1e-12);
}

TEST(Profile, NonpositiveDiagonalThrows) {
  auto m = test::reference_instance();
  m.electron = SparseSym::diagonal(Vector{-1.0});
  EXPECT_THROW(dominance_profile(m), InvalidInstanceError);
}

// ---------------------------------------------------------------------------
// Manifest I/O

TEST(Manifest, RoundTripIsExact) {
  const auto dir = test::scratch_dir("manifest_rt");
  for (const auto& m : {test::reference_instance(), test::random_synthetic(3, 99)}) {
    write_manifest(m, dir / "sys.json", {{"origin", "test"}});
    const auto back = read_manifest(dir / "sys.json");
    EXPECT_EQ(back.matrix, m);
    EXPECT_EQ(back.meta["origin"], "test");
  }
}

TEST(Manifest, PositiveCouplingRejected) {
  const auto dir = test::scratch_dir("manifest_pos");
  write_manifest(test::reference_instance(), dir / "sys.json");
  std::ofstream(dir / "sys_d_r.txt") << "0.5\n";
  try {
    (void)read_manifest(dir / "sys.json");
    FAIL() << "expected IoError";
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("positive coupling entry at index 1"), std::string::npos) << e.what();
  }
}

TEST(Manifest, GeneralSymmetryRejected) {
  const auto dir = test::scratch_dir("manifest_general");
  write_manifest(test::reference_instance(), dir / "sys.json");
  std::ofstream(dir / "sys_A_r.mtx") << "%%MatrixMarket matrix coordinate real general\n1 1 1\n1 1 2\n";
  try {
    (void)read_manifest(dir / "sys.json");
    FAIL() << "expected IoError";
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("symmetric"), std::string::npos) << e.what();
  }
}

TEST(Manifest, DimensionMismatchAndMissingFile) {
  const auto dir = test::scratch_dir("manifest_dim");
  write_manifest(test::reference_instance(), dir / "sys.json");
  std::ofstream(dir / "sys_d_i.txt") << "-1\n-1\n";
  EXPECT_THROW(read_manifest(dir / "sys.json"), IoError);
  EXPECT_THROW(read_manifest(dir / "absent.json"), IoError);
}

TEST(Manifest, FormatRealRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 12345.678901234567}) EXPECT_EQ(std::stod(format_real(v)), v);
}
