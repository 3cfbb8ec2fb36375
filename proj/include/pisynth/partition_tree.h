#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "pisynth/dataset.h"
#include "pisynth/geometry.h"

namespace pisynth {

/// Leaf label. Only kIncluded leaves belong to the candidate set; kExcluded
/// marks partitions whose successors provably leave it and kUnknown marks
/// partitions that hit the resolution floor.
enum class Label : int { kExcluded = 0, kIncluded = 1, kUnknown = -1 };

std::string ToString(Label s);

/// One node of the subdivision tree: a target partition B_{r̂}(x̂), the
/// dataset sample (x, x⁺) nearest to x̂, and the radius r of the sample ball
/// that covers the partition.
struct TreeNode {
  double target_radius{0.0};
  Vector target_center;
  double sample_radius{0.0};
  std::size_t sample_index{0};
  SamplePair sample;
  Label label{Label::kIncluded};
  int parent{-1};
  /// Children occupy node ids [first_child, first_child + child_count).
  int first_child{-1};
  int child_count{0};

  bool is_leaf() const { return child_count == 0; }
  Box target_box() const { return Box(target_center, target_radius); }
  Box sample_box() const { return Box(sample.x, sample_radius); }
};

struct LabelTransition {
  int sweep{0};
  int node{0};
  Label from{Label::kIncluded};
  Label to{Label::kIncluded};
};

/// The subdivision tree over the domain. Nodes are never deleted, so node
/// ids are stable. Children of a node are created together as a contiguous
/// block of 2^n ids, ordered by sign vector: child k is offset by +r̂ in
/// coordinate d when bit d of k is set and by −r̂ otherwise.
///
/// As a CoverageSource the tree serves the target boxes of its active
/// (kIncluded) leaves, i.e. the current candidate set.
class PartitionTree final : public CoverageSource {
 public:
  /// One root per domain box, each matched to its nearest sample and marked
  /// kIncluded. Throws std::invalid_argument on an empty domain or a
  /// dimension mismatch.
  static PartitionTree Create(const BoxList& domain, const Dataset& data);

  /// Rebuilds a tree from a flat node table (e.g. a result file). Validates
  /// parent/child links and the tiling of children. Throws
  /// std::invalid_argument on an inconsistent table.
  static PartitionTree FromNodes(int dim, std::vector<TreeNode> nodes);

  int dim() const { return dim_; }
  std::size_t node_count() const { return nodes_.size(); }
  const TreeNode& node(int id) const { return nodes_.at(id); }
  const std::vector<TreeNode>& nodes() const { return nodes_; }
  const std::vector<int>& roots() const { return roots_; }

  /// Attaches 2^n children to leaf `id`, halving the target radius and
  /// matching each child centre to its nearest sample. Throws
  /// std::logic_error if `id` is not a leaf.
  void Divide(int id, const Dataset& data);

  /// Relabels a leaf. Only kIncluded → kExcluded and kIncluded → kUnknown
  /// change anything; setting the current label is a no-op. Everything else
  /// throws std::logic_error.
  void SetLabel(int id, Label s, int sweep);

  /// Leaves in depth-first creation order.
  std::vector<int> Leaves() const;
  /// Leaves labeled kIncluded, depth-first.
  std::vector<int> ActiveLeaves() const;
  /// Target boxes of the active leaves, depth-first.
  BoxList CandidateSet() const;
  /// Target boxes of the roots.
  BoxList Domain() const;

  std::size_t active_leaf_count() const;

  const std::vector<LabelTransition>& transitions() const {
    return transitions_;
  }

  void CollectTouching(const Rect& probe,
                       std::vector<Rect>* out) const override;

 private:
  PartitionTree() = default;

  TreeNode MakeNode(const Vector& center, double radius, int parent,
                    const Dataset& data) const;
  void AdjustActive(int id, long delta);
  void Collect(int id, const Rect& probe, std::vector<Rect>* out) const;
  template <typename Fn>
  void VisitLeaves(Fn&& fn) const;

  int dim_{0};
  std::vector<TreeNode> nodes_;
  std::vector<int> roots_;
  /// Number of kIncluded leaves in each node's subtree.
  std::vector<long> active_below_;
  std::vector<LabelTransition> transitions_;
};

}  // namespace pisynth
