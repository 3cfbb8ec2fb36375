#include "pisynth/verify.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace pisynth {

std::string ToString(CertMethod m) {
  switch (m) {
    case CertMethod::kExactCoverage:
      return "exact_coverage";
    case CertMethod::kRaster:
      return "raster";
    case CertMethod::kMonteCarlo:
      return "monte_carlo";
  }
  return "?";
}

std::vector<LeafRecord> ActiveLeafRecords(const PartitionTree& tree) {
  std::vector<LeafRecord> out;
  for (int id : tree.ActiveLeaves()) {
    const TreeNode& node = tree.node(id);
    out.push_back({id, node.target_box(), node.sample_radius, node.sample.x,
                   node.sample.x_plus});
  }
  return out;
}

Certificate CheckFixpoint(const std::vector<LeafRecord>& leaves,
                          const BoxList& pi_set, double lipschitz) {
  if (!(lipschitz > 0.0)) {
    throw std::invalid_argument("CheckFixpoint: Lipschitz bound must be > 0");
  }
  Certificate cert;
  cert.method = CertMethod::kExactCoverage;
  auto fail = [&](int id, std::string reason, std::optional<Rect> piece = {}) {
    cert.passed = false;
    cert.first_failure = CertFailure{id, std::move(reason), std::move(piece)};
    return cert;
  };
  if (leaves.size() != pi_set.size()) {
    return fail(-1, "pi_set has " + std::to_string(pi_set.size()) +
                        " boxes but " + std::to_string(leaves.size()) +
                        " active leaves");
  }
  const IndexedBoxSource cover(pi_set);
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    const LeafRecord& leaf = leaves[i];
    const Box& stored = pi_set[i];
    if ((stored.center - leaf.target.center).cwiseAbs().maxCoeff() > kGeomTol ||
        std::abs(stored.radius - leaf.target.radius) > kGeomTol) {
      return fail(leaf.id, "target box does not match pi_set entry");
    }
    const double reach =
        (leaf.target.center - leaf.x).cwiseAbs().maxCoeff() + leaf.target.radius;
    if (reach > leaf.sample_radius + kGeomTol) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "sample ball radius " << leaf.sample_radius
          << " does not cover the target box (needs " << reach << ")";
      return fail(leaf.id, msg.str());
    }
    const Rect successor(SuccessorBox(leaf.x_plus, leaf.sample_radius, lipschitz));
    std::vector<Rect> gaps = UncoveredFragments(successor, cover, 1);
    ++cert.checked_leaves;
    if (!gaps.empty()) {
      return fail(leaf.id, "successor box leaves the set", gaps.front());
    }
  }
  cert.passed = true;
  return cert;
}

Certificate CheckFixpoint(const SynthResult& result, const SynthConfig& config) {
  if (result.config.lipschitz != config.lipschitz) {
    throw std::invalid_argument(
        "result was synthesized with a different Lipschitz bound");
  }
  return CheckFixpoint(ActiveLeafRecords(result.tree), result.pi_set,
                       config.lipschitz);
}

RasterVerdict RasterCoverage(const Box& query, const BoxList& union_boxes,
                             double cell) {
  if (!(cell > 0.0)) throw std::invalid_argument("raster cell must be > 0");
  const int n = query.dim();
  const long per_axis =
      std::max(1L, std::lround(2.0 * query.radius / cell));
  const double pitch = 2.0 * query.radius / per_axis;
  const IndexedBoxSource index(union_boxes);
  std::vector<long> idx(n, 0);
  Vector p(n);
  std::size_t inside = 0;
  std::size_t total = 0;
  while (true) {
    for (int d = 0; d < n; ++d) {
      p[d] = query.center[d] - query.radius + pitch * (idx[d] + 0.5);
    }
    ++total;
    if (index.ContainsPoint(p)) ++inside;
    int d = n - 1;
    for (; d >= 0; --d) {
      if (++idx[d] < per_axis) break;
      idx[d] = 0;
    }
    if (d < 0) break;
  }
  RasterVerdict out;
  out.covered_fraction = static_cast<double>(inside) / total;
  if (inside == total) {
    out.verdict = CoverageClass::kFullyCovered;
  } else if (inside == 0) {
    out.verdict = CoverageClass::kDisjoint;
  } else {
    out.verdict = CoverageClass::kPartial;
  }
  return out;
}

Certificate MonteCarloInvariance(const BoxList& pi_set,
                                 const SystemOracle& oracle,
                                 std::size_t samples, int horizon,
                                 std::uint64_t seed) {
  if (!oracle.map) {
    throw std::invalid_argument("Monte Carlo check needs the true map");
  }
  if (pi_set.empty()) throw std::invalid_argument("Monte Carlo on empty set");
  Certificate cert;
  cert.method = CertMethod::kMonteCarlo;
  const IndexedBoxSource index(pi_set);
  const Rect bounds = BoundingRect(pi_set);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int n = bounds.dim();
  Vector x(n);
  for (std::size_t s = 0; s < samples; ++s) {
    do {
      for (int d = 0; d < n; ++d) {
        x[d] = bounds.lo[d] + (bounds.hi[d] - bounds.lo[d]) * unit(rng);
      }
    } while (!index.ContainsPoint(x));
    Vector state = x;
    for (int k = 1; k <= horizon; ++k) {
      state = oracle(state);
      if (!index.ContainsPoint(state)) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "trajectory " << s << " from (" << x.transpose()
            << ") leaves the set at step " << k;
        cert.passed = false;
        cert.first_failure = CertFailure{-1, msg.str(), std::nullopt};
        return cert;
      }
    }
    ++cert.checked_leaves;
  }
  cert.passed = true;
  return cert;
}

}  // namespace pisynth
