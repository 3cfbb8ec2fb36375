#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace pisynth {

using Vector = Eigen::VectorXd;

/// Absolute tolerance applied to every coordinate comparison.
inline constexpr double kGeomTol = 1e-12;

/// A closed max-norm ball {y : ‖center − y‖∞ ≤ radius}, i.e. an axis-aligned
/// hypercube.
struct Box {
  Vector center;
  double radius{0.0};

  Box() = default;
  Box(Vector c, double r);

  int dim() const { return static_cast<int>(center.size()); }
};

using BoxList = std::vector<Box>;

/// A closed axis-aligned hyperrectangle [lo, hi]. Produced by intersections
/// and subtractions, which generally do not yield cubes.
struct Rect {
  Vector lo;
  Vector hi;

  Rect() = default;
  Rect(Vector l, Vector h);
  explicit Rect(const Box& b);

  int dim() const { return static_cast<int>(lo.size()); }
  double Volume() const;
  /// True when every side is longer than kGeomTol.
  bool IsSolid() const;
};

enum class CoverageClass { kFullyCovered, kDisjoint, kPartial };

std::string ToString(CoverageClass c);

/// Closed-ball membership. Throws std::invalid_argument on dimension mismatch.
bool Contains(const Box& b, const Vector& y);
bool Contains(const Rect& r, const Vector& y);

/// (2·radius)^n.
double Volume(const Box& b);
double TotalVolume(const BoxList& boxes);

/// Coordinatewise [max of lows, min of highs]; absent when empty. Touching
/// boundaries yield a degenerate (zero-width) rectangle, not absence.
std::optional<Rect> Intersect(const Rect& a, const Rect& b);
std::optional<Rect> Intersect(const Box& a, const Box& b);

/// True when the closed rectangles share at least one point.
bool Touches(const Rect& a, const Rect& b);

/// True when the intersection has positive thickness in every coordinate.
bool OverlapsSolidly(const Rect& a, const Rect& b);

/// query \ cover as at most 2n pairwise-disjoint rectangles, using a
/// coordinate sweep. Slivers thinner than kGeomTol are dropped.
std::vector<Rect> Subtract(const Rect& query, const Rect& cover);

/// Anything that can enumerate the cover boxes touching a probe rectangle.
class CoverageSource {
 public:
  virtual ~CoverageSource() = default;

  /// Appends to `out` every cover rectangle that touches `probe` (closed
  /// semantics). Order must be deterministic.
  virtual void CollectTouching(const Rect& probe,
                               std::vector<Rect>* out) const = 0;
};

/// Linear-scan source over a plain list of boxes.
class BoxListSource final : public CoverageSource {
 public:
  explicit BoxListSource(const BoxList& boxes);

  void CollectTouching(const Rect& probe,
                       std::vector<Rect>* out) const override;

 private:
  std::vector<Rect> rects_;
};

/// Grid-bucketed source over a fixed list of boxes. Each box is registered
/// in every grid cell it touches; queries return boxes in list order.
class IndexedBoxSource final : public CoverageSource {
 public:
  explicit IndexedBoxSource(const BoxList& boxes);

  void CollectTouching(const Rect& probe,
                       std::vector<Rect>* out) const override;

  /// Closed membership of a point in the union.
  bool ContainsPoint(const Vector& y) const;

  std::size_t size() const { return rects_.size(); }

 private:
  bool CellRange(const Rect& probe, std::vector<long>* lo,
                 std::vector<long>* hi) const;

  std::vector<Rect> rects_;
  int dim_{0};
  Vector origin_;
  double cell_{1.0};
  std::vector<long> counts_;
  std::vector<long> strides_;
  std::vector<std::size_t> cell_start_;
  std::vector<std::size_t> entries_;
};

/// Exact classification of `query` against the union served by `source`.
CoverageClass ClassifyCoverage(const Rect& query, const CoverageSource& source);
CoverageClass ClassifyCoverage(const Box& query, const CoverageSource& source);

/// Uncovered parts of `query`: an empty result means fully covered. Stops
/// after `max_fragments` survivors (0 means unlimited).
std::vector<Rect> UncoveredFragments(const Rect& query,
                                     const CoverageSource& source,
                                     std::size_t max_fragments = 0);

/// Lipschitz over-approximation of the one-step image of B_r(x): the box of
/// radius L·r about the successor x⁺.
Box SuccessorBox(const Vector& x_plus, double r, double lipschitz);

/// Splits the rectangle [lo, hi] into a row-major list of equal cubes. The
/// common side is the largest value s = min_side / k (k ≤ 64) that divides
/// every side. Throws std::invalid_argument when no such split exists.
BoxList CubesFromBounds(const Vector& lo, const Vector& hi);

/// Parses "lo1,lo2,...:hi1,hi2,..." into root cubes via CubesFromBounds.
BoxList ParseDomain(const std::string& spec);

/// Membership in a union of boxes.
bool InUnion(const BoxList& boxes, const Vector& y);

/// Smallest rectangle containing all boxes. Requires a nonempty list.
Rect BoundingRect(const BoxList& boxes);

}  // namespace pisynth
