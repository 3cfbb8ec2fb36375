#include "pisynth/partition_tree.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace pisynth {
namespace {

bool TouchesCube(const Rect& probe, const Vector& center, double radius) {
  for (int d = 0; d < probe.dim(); ++d) {
    const double lo = std::max(probe.lo[d], center[d] - radius);
    const double hi = std::min(probe.hi[d], center[d] + radius);
    if (lo > hi + kGeomTol) return false;
  }
  return true;
}

}  // namespace

std::string ToString(Label s) {
  switch (s) {
    case Label::kExcluded:
      return "excluded";
    case Label::kIncluded:
      return "included";
    case Label::kUnknown:
      return "unknown";
  }
  return "?";
}

TreeNode PartitionTree::MakeNode(const Vector& center, double radius,
                                 int parent, const Dataset& data) const {
  const NearestResult nn = data.Nearest(center);
  TreeNode node;
  node.target_radius = radius;
  node.target_center = center;
  node.sample_index = nn.index;
  node.sample = data[nn.index];
  node.sample_radius = radius + nn.distance;
  node.label = Label::kIncluded;
  node.parent = parent;
  return node;
}

PartitionTree PartitionTree::Create(const BoxList& domain,
                                    const Dataset& data) {
  if (domain.empty()) throw std::invalid_argument("empty domain");
  PartitionTree tree;
  tree.dim_ = domain.front().dim();
  if (data.dim() != tree.dim_) {
    throw std::invalid_argument("dataset and domain dimensions differ");
  }
  for (const Box& b : domain) {
    if (b.dim() != tree.dim_) {
      throw std::invalid_argument("domain boxes have mixed dimensions");
    }
    if (!(b.radius > 0.0)) {
      throw std::invalid_argument("domain boxes must have positive radius");
    }
    tree.roots_.push_back(static_cast<int>(tree.nodes_.size()));
    tree.nodes_.push_back(tree.MakeNode(b.center, b.radius, -1, data));
    tree.active_below_.push_back(1);
  }
  return tree;
}

PartitionTree PartitionTree::FromNodes(int dim, std::vector<TreeNode> nodes) {
  if (dim <= 0) throw std::invalid_argument("FromNodes: bad dimension");
  if (nodes.empty()) throw std::invalid_argument("FromNodes: no nodes");
  const int fanout = 1 << dim;
  const int count = static_cast<int>(nodes.size());
  PartitionTree tree;
  tree.dim_ = dim;
  for (int id = 0; id < count; ++id) {
    const TreeNode& node = nodes[id];
    if (node.target_center.size() != dim || node.sample.x.size() != dim ||
        node.sample.x_plus.size() != dim) {
      throw std::invalid_argument("FromNodes: node " + std::to_string(id) +
                                  " has wrong dimension");
    }
    if (node.parent == -1) {
      tree.roots_.push_back(id);
    } else if (node.parent < 0 || node.parent >= id) {
      throw std::invalid_argument("FromNodes: node " + std::to_string(id) +
                                  " has an invalid parent");
    }
    if (node.is_leaf()) continue;
    if (node.child_count != fanout || node.first_child <= id ||
        node.first_child + fanout > count) {
      throw std::invalid_argument("FromNodes: node " + std::to_string(id) +
                                  " has an invalid child block");
    }
    for (int k = 0; k < fanout; ++k) {
      const TreeNode& child = nodes[node.first_child + k];
      if (child.parent != id) {
        throw std::invalid_argument("FromNodes: child/parent link mismatch");
      }
      const double half = node.target_radius / 2.0;
      bool ok = std::abs(child.target_radius - half) <= kGeomTol;
      for (int d = 0; d < dim && ok; ++d) {
        const double sign = (k >> d) & 1 ? 1.0 : -1.0;
        ok = std::abs(child.target_center[d] -
                      (node.target_center[d] + sign * half)) <= kGeomTol;
      }
      if (!ok) {
        throw std::invalid_argument("FromNodes: children of node " +
                                    std::to_string(id) +
                                    " do not tile their parent");
      }
    }
  }
  tree.nodes_ = std::move(nodes);
  tree.active_below_.assign(count, 0);
  for (int id = count - 1; id >= 0; --id) {
    const TreeNode& node = tree.nodes_[id];
    if (node.is_leaf() && node.label == Label::kIncluded) {
      tree.active_below_[id] = 1;
    }
    if (node.parent >= 0) {
      tree.active_below_[node.parent] += tree.active_below_[id];
    }
  }
  return tree;
}

void PartitionTree::AdjustActive(int id, long delta) {
  for (int cur = id; cur >= 0; cur = nodes_[cur].parent) {
    active_below_[cur] += delta;
  }
}

void PartitionTree::Divide(int id, const Dataset& data) {
  if (!nodes_.at(id).is_leaf()) {
    throw std::logic_error("Divide: node " + std::to_string(id) +
                           " is not a leaf");
  }
  const int fanout = 1 << dim_;
  const double half = nodes_[id].target_radius / 2.0;
  const Vector parent_center = nodes_[id].target_center;
  const int first = static_cast<int>(nodes_.size());
  for (int k = 0; k < fanout; ++k) {
    Vector center = parent_center;
    for (int d = 0; d < dim_; ++d) center[d] += (k >> d) & 1 ? half : -half;
    nodes_.push_back(MakeNode(center, half, id, data));
    active_below_.push_back(1);
  }
  nodes_[id].first_child = first;
  nodes_[id].child_count = fanout;
  const long was_active = nodes_[id].label == Label::kIncluded ? 1 : 0;
  // Children start kIncluded regardless of the parent's label.
  AdjustActive(id, fanout - was_active);
}

void PartitionTree::SetLabel(int id, Label s, int sweep) {
  TreeNode& node = nodes_.at(id);
  if (!node.is_leaf()) {
    throw std::logic_error("SetLabel: node " + std::to_string(id) +
                           " is not a leaf");
  }
  if (node.label == s) return;
  if (node.label != Label::kIncluded) {
    throw std::logic_error("SetLabel: node " + std::to_string(id) +
                           " cannot leave label " + ToString(node.label));
  }
  transitions_.push_back({sweep, id, node.label, s});
  node.label = s;
  AdjustActive(id, -1);
}

template <typename Fn>
void PartitionTree::VisitLeaves(Fn&& fn) const {
  std::vector<int> stack(roots_.rbegin(), roots_.rend());
  while (!stack.empty()) {
    const int id = stack.back();
    stack.pop_back();
    const TreeNode& node = nodes_[id];
    if (node.is_leaf()) {
      fn(id, node);
      continue;
    }
    for (int k = node.child_count - 1; k >= 0; --k) {
      stack.push_back(node.first_child + k);
    }
  }
}

std::vector<int> PartitionTree::Leaves() const {
  std::vector<int> out;
  VisitLeaves([&](int id, const TreeNode&) { out.push_back(id); });
  return out;
}

std::vector<int> PartitionTree::ActiveLeaves() const {
  std::vector<int> out;
  VisitLeaves([&](int id, const TreeNode& node) {
    if (node.label == Label::kIncluded) out.push_back(id);
  });
  return out;
}

BoxList PartitionTree::CandidateSet() const {
  BoxList out;
  VisitLeaves([&](int, const TreeNode& node) {
    if (node.label == Label::kIncluded) out.push_back(node.target_box());
  });
  return out;
}

BoxList PartitionTree::Domain() const {
  BoxList out;
  for (int id : roots_) out.push_back(nodes_[id].target_box());
  return out;
}

std::size_t PartitionTree::active_leaf_count() const {
  std::size_t total = 0;
  for (int id : roots_) total += active_below_[id];
  return total;
}

void PartitionTree::Collect(int id, const Rect& probe,
                            std::vector<Rect>* out) const {
  if (active_below_[id] == 0) return;
  const TreeNode& node = nodes_[id];
  if (!TouchesCube(probe, node.target_center, node.target_radius)) return;
  if (node.is_leaf()) {
    out->emplace_back(node.target_box());
    return;
  }
  for (int k = 0; k < node.child_count; ++k) {
    Collect(node.first_child + k, probe, out);
  }
}

void PartitionTree::CollectTouching(const Rect& probe,
                                    std::vector<Rect>* out) const {
  if (probe.dim() != dim_) {
    throw std::invalid_argument("CollectTouching: dimension mismatch");
  }
  for (int id : roots_) Collect(id, probe, out);
}

}  // namespace pisynth
