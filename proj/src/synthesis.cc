#include "pisynth/synthesis.h"

#include <stdexcept>
#include <utility>
#include <vector>

namespace pisynth {
namespace {

enum class Action { kKeep, kExclude, kDivide, kMarkUnknown };

Action Decide(CoverageClass verdict, double target_radius, double tau) {
  switch (verdict) {
    case CoverageClass::kFullyCovered:
      return Action::kKeep;
    case CoverageClass::kDisjoint:
      return Action::kExclude;
    case CoverageClass::kPartial:
      return target_radius / 2.0 >= tau ? Action::kDivide
                                        : Action::kMarkUnknown;
  }
  return Action::kKeep;
}

void Apply(Action action, int id, const Dataset& data, int sweep_index,
           PartitionTree* tree, SweepStats* stats) {
  switch (action) {
    case Action::kKeep:
      return;
    case Action::kExclude:
      tree->SetLabel(id, Label::kExcluded, sweep_index);
      ++stats->exclusions;
      break;
    case Action::kMarkUnknown:
      tree->SetLabel(id, Label::kUnknown, sweep_index);
      ++stats->unknowns;
      break;
    case Action::kDivide:
      tree->Divide(id, data);
      ++stats->divisions;
      break;
  }
  stats->changed = true;
}

// Classifies `id` against the live tree and recurses into any children it
// spawns, so new leaves are handled depth-first within the same sweep.
void ProcessSequential(int id, const Dataset& data, const SynthConfig& config,
                       int sweep_index, PartitionTree* tree,
                       SweepStats* stats) {
  const TreeNode& node = tree->node(id);
  const CoverageClass verdict = ClassifyLeaf(node, *tree, config.lipschitz);
  ++stats->classified;
  const Action action = Decide(verdict, node.target_radius, config.tau);
  Apply(action, id, data, sweep_index, tree, stats);
  if (action != Action::kDivide) return;
  const int first = tree->node(id).first_child;
  const int count = tree->node(id).child_count;
  for (int k = 0; k < count; ++k) {
    ProcessSequential(first + k, data, config, sweep_index, tree, stats);
  }
}

}  // namespace

std::string ToString(UpdateMode m) {
  return m == UpdateMode::kSequential ? "sequential" : "batch";
}

UpdateMode ParseUpdateMode(const std::string& text) {
  if (text == "sequential") return UpdateMode::kSequential;
  if (text == "batch") return UpdateMode::kBatch;
  throw std::invalid_argument("unknown update mode '" + text + "'");
}

std::string ToString(Termination t) {
  return t == Termination::kFixpoint ? "fixpoint" : "safeguard";
}

void SynthConfig::Validate() const {
  if (!(lipschitz > 0.0)) {
    throw std::invalid_argument("Lipschitz bound must be > 0");
  }
  if (!(tau > 0.0)) throw std::invalid_argument("tau must be > 0");
  if (max_sweeps < 1) throw std::invalid_argument("max_sweeps must be >= 1");
}

LeafCounts CountLeaves(const PartitionTree& tree) {
  LeafCounts counts;
  for (int id : tree.Leaves()) {
    switch (tree.node(id).label) {
      case Label::kIncluded:
        ++counts.included;
        break;
      case Label::kExcluded:
        ++counts.excluded;
        break;
      case Label::kUnknown:
        ++counts.unknown;
        break;
    }
  }
  return counts;
}

CoverageClass ClassifyLeaf(const TreeNode& leaf,
                           const CoverageSource& candidate, double lipschitz) {
  return ClassifyCoverage(
      SuccessorBox(leaf.sample.x_plus, leaf.sample_radius, lipschitz),
      candidate);
}

SweepStats Sweep(const Dataset& data, const SynthConfig& config,
                 int sweep_index, PartitionTree* tree) {
  SweepStats stats;
  const std::vector<int> active = tree->ActiveLeaves();
  if (config.mode == UpdateMode::kSequential) {
    for (int id : active) {
      ProcessSequential(id, data, config, sweep_index, tree, &stats);
    }
    return stats;
  }
  const IndexedBoxSource snapshot(tree->CandidateSet());
  std::vector<Action> actions(active.size());
  for (std::size_t i = 0; i < active.size(); ++i) {
    const TreeNode& node = tree->node(active[i]);
    actions[i] = Decide(ClassifyLeaf(node, snapshot, config.lipschitz),
                        node.target_radius, config.tau);
    ++stats.classified;
  }
  for (std::size_t i = 0; i < active.size(); ++i) {
    Apply(actions[i], active[i], data, sweep_index, tree, &stats);
  }
  return stats;
}

SynthResult Synthesize(PartitionTree tree, const Dataset& data,
                       const SynthConfig& config,
                       const ProgressCallback& progress) {
  config.Validate();
  for (int id : tree.roots()) {
    if (config.tau > tree.node(id).target_radius) {
      throw std::invalid_argument("tau exceeds the smallest root radius");
    }
  }
  SynthResult result{std::move(tree), config, {}, 0.0, 0, {}, Termination::kFixpoint};
  result.terminated_by = Termination::kSafeguard;
  while (result.sweeps < config.max_sweeps) {
    ++result.sweeps;
    const SweepStats stats = Sweep(data, config, result.sweeps, &result.tree);
    if (progress) {
      const BoxList candidate = result.tree.CandidateSet();
      progress({result.sweeps, candidate.size(), TotalVolume(candidate),
                stats});
    }
    if (!stats.changed) {
      result.terminated_by = Termination::kFixpoint;
      break;
    }
  }
  result.pi_set = result.tree.CandidateSet();
  result.volume = TotalVolume(result.pi_set);
  result.leaf_counts = CountLeaves(result.tree);
  return result;
}

}  // namespace pisynth
