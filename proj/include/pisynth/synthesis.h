#pragma once

#include <cstddef>
#include <functional>
#include <string>

#include "pisynth/dataset.h"
#include "pisynth/geometry.h"
#include "pisynth/partition_tree.h"

namespace pisynth {

enum class UpdateMode {
  /// Each classification sees every change already made in the sweep, and
  /// children created mid-sweep are classified in the same sweep.
  kSequential,
  /// Classifications use the sweep-start candidate set; all changes are
  /// applied when the sweep ends.
  kBatch,
};

std::string ToString(UpdateMode m);
UpdateMode ParseUpdateMode(const std::string& text);

struct SynthConfig {
  /// Max-norm Lipschitz bound of the (unknown) map.
  double lipschitz{0.0};
  /// Smallest target radius a division may create.
  double tau{0.0};
  int max_sweeps{10000};
  UpdateMode mode{UpdateMode::kSequential};

  /// Throws std::invalid_argument if L ≤ 0, tau ≤ 0 or max_sweeps < 1.
  void Validate() const;
};

struct SweepStats {
  bool changed{false};
  std::size_t classified{0};
  std::size_t divisions{0};
  std::size_t exclusions{0};
  std::size_t unknowns{0};
};

enum class Termination { kFixpoint, kSafeguard };

std::string ToString(Termination t);

struct LeafCounts {
  std::size_t included{0};
  std::size_t excluded{0};
  std::size_t unknown{0};
};

LeafCounts CountLeaves(const PartitionTree& tree);

struct SynthResult {
  PartitionTree tree;
  SynthConfig config;
  /// Target boxes of the active leaves at termination.
  BoxList pi_set;
  double volume{0.0};
  int sweeps{0};
  LeafCounts leaf_counts;
  Termination terminated_by{Termination::kFixpoint};
};

struct ProgressEvent {
  int sweep{0};
  std::size_t active_leaves{0};
  double volume{0.0};
  SweepStats stats;
};

using ProgressCallback = std::function<void(const ProgressEvent&)>;

/// Classifies the successor box B⁺ = {y : ‖x⁺ − y‖∞ ≤ L·r} of an active
/// leaf against the candidate set.
CoverageClass ClassifyLeaf(const TreeNode& leaf, const CoverageSource& candidate,
                           double lipschitz);

/// One pass over the leaves that are active when the sweep starts, in
/// depth-first order. FullyCovered keeps a leaf, Disjoint excludes it, and
/// Partial divides it (if r̂/2 ≥ tau) or marks it unknown.
SweepStats Sweep(const Dataset& data, const SynthConfig& config,
                 int sweep_index, PartitionTree* tree);

/// Sweeps until nothing changes or max_sweeps is reached.
SynthResult Synthesize(PartitionTree tree, const Dataset& data,
                       const SynthConfig& config,
                       const ProgressCallback& progress = {});

}  // namespace pisynth
