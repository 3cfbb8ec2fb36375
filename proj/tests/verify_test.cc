#include "pisynth/verify.h"

#include <random>

#include <gtest/gtest.h>

#include "test_util.h"

namespace pisynth {
namespace {

Vector V(double a, double b) { return Vector{{a, b}}; }

SynthResult RunSynth(const SystemOracle& sys, const Dataset& data, double tau,
                     UpdateMode mode = UpdateMode::kSequential) {
  const BoxList domain = ParseDomain(sys.default_domain);
  SynthConfig config;
  config.lipschitz = sys.lipschitz;
  config.tau = tau;
  config.mode = mode;
  return Synthesize(PartitionTree::Create(domain, data), data, config);
}

// A single box near (0.9, 0.9) under the linear map: its successor lands
// near (0.559, −0.293), far outside the box.
std::vector<LeafRecord> EscapingLeaf() {
  const SystemOracle sys = Linear2d();
  const Vector x = V(0.9, 0.9);
  return {LeafRecord{7, Box(x, 0.05), 0.05, x, sys(x)}};
}

TEST(CheckFixpointTest, EscapingSetFailsWithItsLeafId) {
  const auto leaves = EscapingLeaf();
  const Certificate cert =
      CheckFixpoint(leaves, {leaves[0].target}, Linear2d().lipschitz);
  EXPECT_FALSE(cert.passed);
  ASSERT_TRUE(cert.first_failure.has_value());
  EXPECT_EQ(cert.first_failure->leaf_id, 7);
  ASSERT_TRUE(cert.first_failure->uncovered.has_value());
  EXPECT_EQ(cert.method, CertMethod::kExactCoverage);
}

TEST(CheckFixpointTest, EmptySetPasses) {
  const Certificate cert = CheckFixpoint({}, {}, 0.8225);
  EXPECT_TRUE(cert.passed);
  EXPECT_EQ(cert.checked_leaves, 0u);
}

TEST(CheckFixpointTest, FreshResultsPass) {
  const SystemOracle sys = Linear2d();
  const Dataset data =
      GenerateUniform(sys, ParseDomain(sys.default_domain), 5000, 2);
  for (UpdateMode mode : {UpdateMode::kSequential, UpdateMode::kBatch}) {
    const SynthResult result = RunSynth(sys, data, 0.01, mode);
    ASSERT_EQ(result.terminated_by, Termination::kFixpoint);
    const Certificate cert = CheckFixpoint(result, result.config);
    EXPECT_TRUE(cert.passed);
    EXPECT_EQ(cert.checked_leaves, result.pi_set.size());
  }
}

TEST(CheckFixpointTest, DetectsTampering) {
  const SystemOracle sys = Linear2d();
  const Dataset data =
      GenerateUniform(sys, ParseDomain(sys.default_domain), 5000, 2);
  const SynthResult result = RunSynth(sys, data, 0.01);
  const auto leaves = ActiveLeafRecords(result.tree);
  ASSERT_GT(leaves.size(), 3u);

  // A shrunken sample radius no longer covers the target box.
  auto shrunk = leaves;
  shrunk[3].sample_radius = 0.5 * shrunk[3].target.radius;
  Certificate cert = CheckFixpoint(shrunk, result.pi_set, sys.lipschitz);
  EXPECT_FALSE(cert.passed);
  EXPECT_EQ(cert.first_failure->leaf_id, leaves[3].id);

  // A set box that disagrees with its leaf.
  BoxList edited = result.pi_set;
  edited[2].radius *= 0.9;
  cert = CheckFixpoint(leaves, edited, sys.lipschitz);
  EXPECT_FALSE(cert.passed);
  EXPECT_EQ(cert.first_failure->leaf_id, leaves[2].id);

  // Dropping a box changes the count.
  edited = result.pi_set;
  edited.pop_back();
  cert = CheckFixpoint(leaves, edited, sys.lipschitz);
  EXPECT_FALSE(cert.passed);

  // A larger Lipschitz constant inflates every successor box.
  cert = CheckFixpoint(leaves, result.pi_set, 10.0);
  EXPECT_FALSE(cert.passed);

  SynthConfig other = result.config;
  other.lipschitz = 1.0;
  EXPECT_THROW(CheckFixpoint(result, other), std::invalid_argument);
}

TEST(RasterCoverageTest, Examples) {
  const BoxList cover = {Box(V(0, 0), 0.5)};
  RasterVerdict v = RasterCoverage(Box(V(0, 0), 0.1), cover, 0.01);
  EXPECT_EQ(v.covered_fraction, 1.0);
  EXPECT_EQ(v.verdict, CoverageClass::kFullyCovered);
  v = RasterCoverage(Box(V(10, 10), 0.1), cover, 0.01);
  EXPECT_EQ(v.covered_fraction, 0.0);
  EXPECT_EQ(v.verdict, CoverageClass::kDisjoint);
  // [−0.5, 0.5]^2 against [0, 1]^2: a quarter is covered.
  const double cell = 0.01;
  v = RasterCoverage(Box(V(0, 0), 0.5), {Box(V(0.5, 0.5), 0.5)}, cell);
  EXPECT_NEAR(1.0 - v.covered_fraction, 0.75, 2 * cell / 1.0);
  EXPECT_EQ(v.verdict, CoverageClass::kPartial);
  EXPECT_THROW(RasterCoverage(Box(V(0, 0), 0.1), cover, 0.0),
               std::invalid_argument);
}

// Exact classification and rasterization agree on every margin-separated
// lattice instance.
void ExpectOracleAgreement(int n, int max_query_steps, double cell,
                           std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  int verdicts[3] = {0, 0, 0};
  for (int k = 0; k < 1000; ++k) {
    const auto inst =
        testing::RandomSeparatedInstance(rng, n, max_query_steps, cell);
    const CoverageClass exact =
        ClassifyCoverage(inst.query, IndexedBoxSource(inst.cover));
    const RasterVerdict raster = RasterCoverage(inst.query, inst.cover, cell);
    ASSERT_EQ(exact, raster.verdict) << "instance " << k << " n=" << n;
    ++verdicts[static_cast<int>(exact)];
  }
  for (int c : verdicts) EXPECT_GT(c, 50);
}

TEST(OracleAgreementTest, GrazingBoxesArePartialForTheExactClassifier) {
  const BoxList cover = {Box(V(1.0, 0.0), 0.5)};
  EXPECT_EQ(ClassifyCoverage(Box(V(0, 0), 0.5), BoxListSource(cover)),
            CoverageClass::kPartial);
  EXPECT_EQ(RasterCoverage(Box(V(0, 0), 0.5), cover, 0.01).verdict,
            CoverageClass::kDisjoint);
  EXPECT_FALSE(testing::MarginSeparated({Box(V(0, 0), 0.5), cover}, 0.01));
}

TEST(OracleAgreementTest, TwoDimensions) {
  ExpectOracleAgreement(2, 10, testing::kLattice / 4, 101);
}

TEST(OracleAgreementTest, ThreeDimensions) {
  ExpectOracleAgreement(3, 6, testing::kLattice / 2, 202);
}

TEST(MonteCarloTest, CertifiedLinearSetHasNoEscapes) {
  const SystemOracle sys = Linear2d();
  const Dataset data =
      GenerateDyadicGrid(sys, ParseDomain(sys.default_domain), 0.001);
  const SynthResult result = RunSynth(sys, data, 0.001);
  ASSERT_TRUE(CheckFixpoint(result, result.config).passed);
  const Certificate mc = MonteCarloInvariance(result.pi_set, sys, 100000, 50, 1);
  EXPECT_TRUE(mc.passed);
  EXPECT_EQ(mc.checked_leaves, 100000u);
  EXPECT_EQ(mc.method, CertMethod::kMonteCarlo);
}

TEST(MonteCarloTest, EscapingSetFailsQuickly) {
  const auto leaves = EscapingLeaf();
  const Certificate mc =
      MonteCarloInvariance({leaves[0].target}, Linear2d(), 100000, 50, 1);
  EXPECT_FALSE(mc.passed);
  EXPECT_EQ(mc.checked_leaves, 0u);
  ASSERT_TRUE(mc.first_failure.has_value());
  EXPECT_NE(mc.first_failure->reason.find("step 1"), std::string::npos);
}

TEST(MonteCarloTest, ZeroHorizonPassesTrivially) {
  const auto leaves = EscapingLeaf();
  EXPECT_TRUE(MonteCarloInvariance({leaves[0].target}, Linear2d(), 100, 0, 1)
                  .passed);
}

TEST(MonteCarloTest, RejectsMissingInputs) {
  SystemOracle no_map = Linear2d();
  no_map.map = nullptr;
  EXPECT_THROW(MonteCarloInvariance({Box(V(0, 0), 0.1)}, no_map, 10, 1, 1),
               std::invalid_argument);
  EXPECT_THROW(MonteCarloInvariance({}, Linear2d(), 10, 1, 1),
               std::invalid_argument);
}

// A passing exact certificate implies the falsifier finds nothing.
TEST(SoundnessTest, CertifiedRunsSurviveSimulation) {
  for (const SystemOracle& sys : {Linear2d(), Nonlinear2d()}) {
    const BoxList domain = ParseDomain(sys.default_domain);
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
      const Dataset data = GenerateUniform(sys, domain, 8000, seed);
      const SynthResult result = RunSynth(sys, data, 0.01);
      const Certificate cert = CheckFixpoint(result, result.config);
      ASSERT_TRUE(cert.passed);
      if (result.pi_set.empty()) continue;
      EXPECT_TRUE(MonteCarloInvariance(result.pi_set, sys, 5000, 50, seed).passed)
          << sys.name << " seed " << seed;
    }
  }
}

}  // namespace
}  // namespace pisynth
