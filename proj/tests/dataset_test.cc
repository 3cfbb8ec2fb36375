#include "pisynth/dataset.h"

#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

namespace pisynth {
namespace {

Vector V(double a, double b) { return Vector{{a, b}}; }

Dataset FromText(const std::string& text, const LoadOptions& options = {},
                 LoadReport* report = nullptr) {
  std::istringstream in(text);
  return ReadDataset(in, options, report);
}

DatasetError::Code LoadErrorCode(const std::string& text,
                                 const LoadOptions& options = {}) {
  try {
    FromText(text, options);
  } catch (const DatasetError& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected a DatasetError";
  return DatasetError::Code::kIo;
}

std::string ToText(const Dataset& data) {
  std::ostringstream out;
  WriteDataset(out, data);
  return out.str();
}

TEST(LoadDatasetTest, TwoRows) {
  const Dataset d = FromText("0,0,0,0\n1,1,0.5,0.5\n", {2, {}});
  ASSERT_EQ(d.size(), 2u);
  EXPECT_EQ(d.dim(), 2);
  EXPECT_EQ(d[1].x, V(1, 1));
  EXPECT_EQ(d[1].x_plus, V(0.5, 0.5));
}

TEST(LoadDatasetTest, ColumnCountMismatchIsADimensionError) {
  EXPECT_EQ(LoadErrorCode("0,0,0\n", {2, {}}), DatasetError::Code::kDimension);
  EXPECT_EQ(LoadErrorCode("0,0,0\n"), DatasetError::Code::kDimension);
  EXPECT_EQ(LoadErrorCode("0,0,0,0\n1,1,1\n"), DatasetError::Code::kDimension);
}

TEST(LoadDatasetTest, EmptyInputIsAnEmptyError) {
  EXPECT_EQ(LoadErrorCode(""), DatasetError::Code::kEmpty);
  EXPECT_EQ(LoadErrorCode("# system=linear2d\nx1,x2,xp1,xp2\n"),
            DatasetError::Code::kEmpty);
}

TEST(LoadDatasetTest, MalformedRow) {
  EXPECT_EQ(LoadErrorCode("0,0,0,0\n0,zz,0,0\n"),
            DatasetError::Code::kMalformedRow);
}

TEST(LoadDatasetTest, MissingFileIsAnIoError) {
  try {
    LoadDataset("/nonexistent/dir/data.csv");
    FAIL() << "expected a DatasetError";
  } catch (const DatasetError& e) {
    EXPECT_EQ(e.code(), DatasetError::Code::kIo);
  }
}

TEST(LoadDatasetTest, HeaderAndMetadata) {
  const Dataset d =
      FromText("# system = linear2d\n# seed=7\nx1,x2,xp1,xp2\n\n0.5,0,1,2\n");
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d.metadata().at("system"), "linear2d");
  EXPECT_EQ(d.metadata().at("seed"), "7");
}

TEST(LoadDatasetTest, RowsOutsideTheDomainAreRejected) {
  LoadReport report;
  const Dataset d = FromText("0,0,0,0\n5,5,0,0\n0.5,0.5,9,9\n",
                             {0, {Box(V(0, 0), 1.0)}}, &report);
  EXPECT_EQ(d.size(), 2u);
  ASSERT_EQ(report.rejected_lines.size(), 1u);
  EXPECT_EQ(report.rejected_lines[0], 2u);
}

TEST(LoadDatasetTest, WriteThenReadIsExact) {
  const Dataset d = GenerateUniform(Nonlinear2d(), ParseDomain("-1,-1:1,1"),
                                    500, 3);
  const Dataset back = FromText(ToText(d));
  ASSERT_EQ(back.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    EXPECT_EQ(back[i].x, d[i].x);
    EXPECT_EQ(back[i].x_plus, d[i].x_plus);
  }
  EXPECT_EQ(back.metadata(), d.metadata());
}

TEST(GenerateUniformTest, SamplesLieInTheDomain) {
  const BoxList domain = ParseDomain(Linear2d().default_domain);
  const Dataset d = GenerateUniform(Linear2d(), domain, 100, 1);
  ASSERT_EQ(d.size(), 100u);
  for (const SamplePair& p : d.pairs()) EXPECT_TRUE(InUnion(domain, p.x));
}

TEST(GenerateUniformTest, Reproducible) {
  const BoxList domain = ParseDomain(Linear2d().default_domain);
  EXPECT_EQ(ToText(GenerateUniform(Linear2d(), domain, 1000, 42)),
            ToText(GenerateUniform(Linear2d(), domain, 1000, 42)));
  EXPECT_NE(ToText(GenerateUniform(Linear2d(), domain, 1000, 42)),
            ToText(GenerateUniform(Linear2d(), domain, 1000, 43)));
}

TEST(GenerateUniformTest, NonlinearSuccessorsMayLeaveTheDomain) {
  const SystemOracle sys = Nonlinear2d();
  const Vector corner = sys(V(1, 1));
  EXPECT_NEAR(corner[0], -0.2, 1e-15);
  EXPECT_NEAR(corner[1], 1.9, 1e-15);
  const BoxList domain = ParseDomain(sys.default_domain);
  const Dataset d = GenerateUniform(sys, domain, 10000, 1);
  std::size_t escaped = 0;
  for (const SamplePair& p : d.pairs()) {
    EXPECT_TRUE(InUnion(domain, p.x));
    escaped += !InUnion(domain, p.x_plus);
  }
  EXPECT_GT(escaped, 0u);
}

TEST(GenerateUniformTest, MultiRootDomainsAreCoveredProportionally) {
  const BoxList domain = ParseDomain("0,0:2,1");
  const Dataset d = GenerateUniform(Linear2d(), domain, 4000, 9);
  std::size_t right = 0;
  for (const SamplePair& p : d.pairs()) right += p.x[0] > 1.0;
  EXPECT_NEAR(static_cast<double>(right) / d.size(), 0.5, 0.05);
}

// Independent count of target centres over levels l with R / 2^l >= tau.
std::size_t DyadicCount(double root_radius, double tau, int n) {
  std::size_t total = 0;
  for (int level = 0; level == 0 || root_radius / std::pow(2.0, level) >= tau;
       ++level) {
    total += static_cast<std::size_t>(std::pow(2.0, n * level));
  }
  return total;
}

TEST(GenerateDyadicGridTest, Counts) {
  const BoxList domain = ParseDomain(Linear2d().default_domain);
  EXPECT_EQ(GenerateDyadicGrid(Linear2d(), domain, 0.3125).size(), 5u);
  EXPECT_EQ(GenerateDyadicGrid(Linear2d(), domain, 0.7).size(), 1u);
  // Levels 0..5 reach r = 0.01953125; level 6 would be below tau.
  EXPECT_EQ(DyadicCount(0.625, 0.01, 2), 1365u);
  EXPECT_EQ(GenerateDyadicGrid(Linear2d(), domain, 0.01).size(), 1365u);
  EXPECT_EQ(GenerateDyadicGrid(Linear2d(), domain, 0.001).size(),
            DyadicCount(0.625, 0.001, 2));
  EXPECT_EQ(GenerateDyadicGrid(Nonlinear2d(), ParseDomain("-1,-1:1,1"), 0.01)
                .size(),
            DyadicCount(1.0, 0.01, 2));
}

TEST(GenerateDyadicGridTest, SmallestLevelCentres) {
  const BoxList domain = ParseDomain(Linear2d().default_domain);
  const Dataset d = GenerateDyadicGrid(Linear2d(), domain, 0.3125);
  EXPECT_EQ(d[0].x, V(0.375, -0.375));
  EXPECT_EQ(d[1].x, V(0.0625, -0.6875));
  EXPECT_EQ(d.metadata().at("M"), "5");
  EXPECT_EQ(d.metadata().at("mode"), "grid");
}

TEST(NearestTest, Examples) {
  const Dataset d({{V(0, 0), V(0, 0)}, {V(1, 1), V(0, 0)}});
  NearestResult r = d.Nearest(V(0.2, 0.1));
  EXPECT_EQ(r.index, 0u);
  EXPECT_DOUBLE_EQ(r.distance, 0.2);
  r = d.Nearest(V(0.5, 0.5));
  EXPECT_EQ(r.index, 0u);
  EXPECT_DOUBLE_EQ(r.distance, 0.5);
  r = d.Nearest(V(1, 1));
  EXPECT_EQ(r.index, 1u);
  EXPECT_EQ(r.distance, 0.0);
}

TEST(NearestTest, DuplicatePointsPreferTheLowestIndex) {
  const Dataset d({{V(1, 1), V(0, 0)}, {V(0, 0), V(0, 0)}, {V(0, 0), V(1, 1)}});
  EXPECT_EQ(d.Nearest(V(0.1, 0)).index, 1u);
}

TEST(NearestTest, IndexMatchesLinearScan) {
  std::mt19937_64 rng(17);
  for (int n : {1, 2, 3}) {
    for (int layout = 0; layout < 3; ++layout) {
      std::vector<SamplePair> pairs;
      std::uniform_real_distribution<double> wide(-1.0, 1.0);
      std::normal_distribution<double> cluster(0.3, 0.01);
      std::uniform_int_distribution<int> lattice(-5, 5);
      for (int k = 0; k < 2000; ++k) {
        Vector x(n);
        for (int d = 0; d < n; ++d) {
          x[d] = layout == 0   ? wide(rng)
                 : layout == 1 ? (k % 2 ? cluster(rng) : wide(rng))
                               : 0.1 * lattice(rng);
        }
        pairs.push_back({x, x});
      }
      const Dataset d(std::move(pairs));
      std::uniform_real_distribution<double> query(-1.5, 1.5);
      for (int q = 0; q < 1000; ++q) {
        Vector p(n);
        for (int d = 0; d < n; ++d) {
          p[d] = layout == 2 ? 0.05 * lattice(rng) : query(rng);
        }
        const NearestResult a = d.Nearest(p);
        const NearestResult b = d.NearestLinearScan(p);
        ASSERT_EQ(a.index, b.index) << "n=" << n << " layout=" << layout;
        ASSERT_EQ(a.distance, b.distance);
      }
    }
  }
}

void ExpectLipschitz(const SystemOracle& sys, double bound) {
  const BoxList domain = ParseDomain(sys.default_domain);
  const Rect r = BoundingRect(domain);
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int k = 0; k < 100000; ++k) {
    Vector p(2), q(2);
    for (int d = 0; d < 2; ++d) {
      p[d] = r.lo[d] + (r.hi[d] - r.lo[d]) * u(rng);
      // Half the pairs are close together, where the ratio approaches the
      // local Jacobian norm.
      q[d] = k % 2 ? r.lo[d] + (r.hi[d] - r.lo[d]) * u(rng)
                   : std::clamp(p[d] + 1e-3 * (u(rng) - 0.5), r.lo[d], r.hi[d]);
    }
    const double dx = (p - q).cwiseAbs().maxCoeff();
    if (dx == 0.0) continue;
    const double dy = (sys(p) - sys(q)).cwiseAbs().maxCoeff();
    worst = std::max(worst, dy / dx);
  }
  EXPECT_LE(worst, bound) << sys.name;
}

TEST(SystemTest, BuiltinLipschitzBoundsHold) {
  ExpectLipschitz(Linear2d(), 0.8225);
  ExpectLipschitz(Nonlinear2d(), 5.728);
}

TEST(SystemTest, LinearMatrix) {
  const SystemOracle sys = Linear2d();
  const Vector y = sys(V(0.9, 0.9));
  EXPECT_NEAR(y[0], 0.55917, 1e-12);
  EXPECT_NEAR(y[1], -0.29295, 1e-12);
  EXPECT_EQ(sys.lipschitz, 0.8225);
}

TEST(SystemTest, UserMatrix) {
  const Eigen::MatrixXd a = ParseMatrix("0.5,0;0,-0.25");
  EXPECT_EQ(a.rows(), 2);
  const SystemOracle sys = LinearSystem(a);
  EXPECT_DOUBLE_EQ(sys.lipschitz, 0.5);
  EXPECT_EQ(sys(V(1, 1)), V(0.5, -0.25));
  EXPECT_THROW(ParseMatrix("1,2;3"), std::invalid_argument);
  EXPECT_THROW(LinearSystem(ParseMatrix("1,2;3,4;5,6")), std::invalid_argument);
  EXPECT_THROW(BuiltinSystem("bogus"), std::invalid_argument);
}

TEST(FingerprintTest, KnownVectors) {
  EXPECT_EQ(Fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(Fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(Fnv1a64("foobar"), 0x85944171f73967e8ULL);
}

}  // namespace
}  // namespace pisynth
