#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pisynth/dataset.h"
#include "pisynth/geometry.h"
#include "pisynth/synthesis.h"

namespace pisynth {

// Only CheckFixpoint is a proof: it re-derives the invariance condition from
// the stored leaves and the Lipschitz bound. The raster and Monte Carlo
// checks are falsifiers used to cross-examine it.

enum class CertMethod { kExactCoverage, kRaster, kMonteCarlo };

std::string ToString(CertMethod m);

struct CertFailure {
  int leaf_id{-1};
  std::string reason;
  /// An uncovered piece of the leaf's successor box, when that was the cause.
  std::optional<Rect> uncovered;
};

struct Certificate {
  bool passed{false};
  std::size_t checked_leaves{0};
  std::optional<CertFailure> first_failure;
  CertMethod method{CertMethod::kExactCoverage};
};

/// What the verifier needs from one active leaf.
struct LeafRecord {
  int id{-1};
  Box target;
  double sample_radius{0.0};
  Vector x;
  Vector x_plus;
};

std::vector<LeafRecord> ActiveLeafRecords(const PartitionTree& tree);

/// Checks, for every leaf: the sample ball covers the target box
/// (‖x̂ − x‖∞ + r̂ ≤ r), the leaf's target box is the matching pi_set entry,
/// and the successor box B⁺ (centre x⁺, radius L·r) is covered by pi_set.
/// An empty set passes.
Certificate CheckFixpoint(const std::vector<LeafRecord>& leaves,
                          const BoxList& pi_set, double lipschitz);

/// Throws std::invalid_argument if the result was produced with a different
/// Lipschitz bound than `config`.
Certificate CheckFixpoint(const SynthResult& result, const SynthConfig& config);

struct RasterVerdict {
  double covered_fraction{0.0};
  CoverageClass verdict{CoverageClass::kDisjoint};
};

/// Samples the query box at the centres of a regular grid of pitch ≈ `cell`
/// and counts the points inside the union.
RasterVerdict RasterCoverage(const Box& query, const BoxList& union_boxes,
                             double cell);

/// Draws `samples` points uniformly from pi_set (rejection sampling over its
/// bounding rectangle) and iterates the true map `horizon` steps, failing on
/// the first iterate that leaves the set. Throws std::invalid_argument when
/// the oracle has no map or pi_set is empty.
Certificate MonteCarloInvariance(const BoxList& pi_set,
                                 const SystemOracle& oracle,
                                 std::size_t samples, int horizon,
                                 std::uint64_t seed);

}  // namespace pisynth
