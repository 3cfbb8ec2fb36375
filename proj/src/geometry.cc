#include "pisynth/geometry.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace pisynth {
namespace {

void CheckDims(int a, int b, const char* what) {
  if (a != b) {
    std::ostringstream msg;
    msg << what << ": dimension mismatch (" << a << " vs " << b << ")";
    throw std::invalid_argument(msg.str());
  }
}

std::vector<double> SplitNumbers(const std::string& text) {
  std::vector<double> values;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad number in domain: '" + item + "'");
    }
    if (item.find_first_not_of(" \t", used) != std::string::npos) {
      throw std::invalid_argument("bad number in domain: '" + item + "'");
    }
    values.push_back(v);
  }
  return values;
}

}  // namespace

Box::Box(Vector c, double r) : center(std::move(c)), radius(r) {
  if (!(r >= 0.0)) throw std::invalid_argument("Box: negative radius");
}

Rect::Rect(Vector l, Vector h) : lo(std::move(l)), hi(std::move(h)) {
  CheckDims(static_cast<int>(lo.size()), static_cast<int>(hi.size()), "Rect");
}

Rect::Rect(const Box& b)
    : lo(b.center.array() - b.radius), hi(b.center.array() + b.radius) {}

double Rect::Volume() const {
  double v = 1.0;
  for (int i = 0; i < dim(); ++i) v *= std::max(0.0, hi[i] - lo[i]);
  return v;
}

bool Rect::IsSolid() const {
  for (int i = 0; i < dim(); ++i) {
    if (hi[i] - lo[i] <= kGeomTol) return false;
  }
  return true;
}

std::string ToString(CoverageClass c) {
  switch (c) {
    case CoverageClass::kFullyCovered:
      return "FullyCovered";
    case CoverageClass::kDisjoint:
      return "Disjoint";
    case CoverageClass::kPartial:
      return "Partial";
  }
  return "?";
}

bool Contains(const Box& b, const Vector& y) {
  CheckDims(b.dim(), static_cast<int>(y.size()), "Contains");
  return (b.center - y).cwiseAbs().maxCoeff() <= b.radius + kGeomTol;
}

bool Contains(const Rect& r, const Vector& y) {
  CheckDims(r.dim(), static_cast<int>(y.size()), "Contains");
  for (int i = 0; i < r.dim(); ++i) {
    if (y[i] < r.lo[i] - kGeomTol || y[i] > r.hi[i] + kGeomTol) return false;
  }
  return true;
}

double Volume(const Box& b) { return std::pow(2.0 * b.radius, b.dim()); }

double TotalVolume(const BoxList& boxes) {
  double v = 0.0;
  for (const Box& b : boxes) v += Volume(b);
  return v;
}

std::optional<Rect> Intersect(const Rect& a, const Rect& b) {
  CheckDims(a.dim(), b.dim(), "Intersect");
  Vector lo = a.lo.cwiseMax(b.lo);
  Vector hi = a.hi.cwiseMin(b.hi);
  for (int i = 0; i < a.dim(); ++i) {
    if (lo[i] > hi[i] + kGeomTol) return std::nullopt;
    // Snap tolerance-level inversions to a degenerate face.
    if (lo[i] > hi[i]) hi[i] = lo[i];
  }
  return Rect(std::move(lo), std::move(hi));
}

std::optional<Rect> Intersect(const Box& a, const Box& b) {
  return Intersect(Rect(a), Rect(b));
}

bool Touches(const Rect& a, const Rect& b) {
  for (int i = 0; i < a.dim(); ++i) {
    if (std::max(a.lo[i], b.lo[i]) > std::min(a.hi[i], b.hi[i]) + kGeomTol) {
      return false;
    }
  }
  return true;
}

bool OverlapsSolidly(const Rect& a, const Rect& b) {
  for (int i = 0; i < a.dim(); ++i) {
    if (std::min(a.hi[i], b.hi[i]) - std::max(a.lo[i], b.lo[i]) <= kGeomTol) {
      return false;
    }
  }
  return true;
}

std::vector<Rect> Subtract(const Rect& query, const Rect& cover) {
  CheckDims(query.dim(), cover.dim(), "Subtract");
  std::vector<Rect> pieces;
  if (!OverlapsSolidly(query, cover)) {
    if (query.IsSolid()) pieces.push_back(query);
    return pieces;
  }
  // Peel slabs off the remaining core one coordinate at a time.
  Rect core = query;
  for (int d = 0; d < query.dim(); ++d) {
    if (core.lo[d] < cover.lo[d] - kGeomTol) {
      Rect slab = core;
      slab.hi[d] = cover.lo[d];
      if (slab.IsSolid()) pieces.push_back(std::move(slab));
    }
    if (core.lo[d] < cover.lo[d]) core.lo[d] = cover.lo[d];
    if (core.hi[d] > cover.hi[d] + kGeomTol) {
      Rect slab = core;
      slab.lo[d] = cover.hi[d];
      if (slab.IsSolid()) pieces.push_back(std::move(slab));
    }
    if (core.hi[d] > cover.hi[d]) core.hi[d] = cover.hi[d];
  }
  return pieces;
}

BoxListSource::BoxListSource(const BoxList& boxes) {
  rects_.reserve(boxes.size());
  for (const Box& b : boxes) rects_.emplace_back(b);
}

void BoxListSource::CollectTouching(const Rect& probe,
                                    std::vector<Rect>* out) const {
  for (const Rect& r : rects_) {
    CheckDims(probe.dim(), r.dim(), "CollectTouching");
    if (Touches(probe, r)) out->push_back(r);
  }
}

IndexedBoxSource::IndexedBoxSource(const BoxList& boxes) {
  rects_.reserve(boxes.size());
  for (const Box& b : boxes) rects_.emplace_back(b);
  if (rects_.empty()) return;
  dim_ = rects_.front().dim();
  Rect bounds = rects_.front();
  std::vector<double> sides;
  sides.reserve(rects_.size());
  for (const Rect& r : rects_) {
    CheckDims(dim_, r.dim(), "IndexedBoxSource");
    bounds.lo = bounds.lo.cwiseMin(r.lo);
    bounds.hi = bounds.hi.cwiseMax(r.hi);
    sides.push_back((r.hi - r.lo).maxCoeff());
  }
  std::nth_element(sides.begin(), sides.begin() + sides.size() / 2,
                   sides.end());
  const double extent = std::max((bounds.hi - bounds.lo).maxCoeff(), 1e-9);
  cell_ = std::max({sides[sides.size() / 2], extent / std::pow(4.0e6, 1.0 / dim_),
                    1e-9});
  origin_ = bounds.lo;
  counts_.resize(dim_);
  strides_.resize(dim_);
  long total = 1;
  for (int d = dim_ - 1; d >= 0; --d) {
    counts_[d] =
        static_cast<long>(std::floor((bounds.hi[d] - bounds.lo[d]) / cell_)) +
        1;
    strides_[d] = total;
    total *= counts_[d];
  }
  // Two passes: count, then fill, so each bucket lists boxes in order.
  std::vector<std::size_t> fill(total + 1, 0);
  std::vector<long> lo(dim_), hi(dim_), cur(dim_);
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t i = 0; i < rects_.size(); ++i) {
      CellRange(rects_[i], &lo, &hi);
      cur = lo;
      while (true) {
        long id = 0;
        for (int d = 0; d < dim_; ++d) id += cur[d] * strides_[d];
        if (pass == 0) {
          ++fill[id + 1];
        } else {
          entries_[fill[id]++] = i;
        }
        int d = dim_ - 1;
        for (; d >= 0; --d) {
          if (++cur[d] <= hi[d]) break;
          cur[d] = lo[d];
        }
        if (d < 0) break;
      }
    }
    if (pass == 0) {
      for (long c = 0; c < total; ++c) fill[c + 1] += fill[c];
      cell_start_ = fill;
      entries_.resize(fill[total]);
    }
  }
}

bool IndexedBoxSource::CellRange(const Rect& probe, std::vector<long>* lo,
                                 std::vector<long>* hi) const {
  bool inside = true;
  for (int d = 0; d < dim_; ++d) {
    const double a = std::floor((probe.lo[d] - kGeomTol - origin_[d]) / cell_);
    const double b = std::floor((probe.hi[d] + kGeomTol - origin_[d]) / cell_);
    if (b < 0 || a > counts_[d] - 1) inside = false;
    (*lo)[d] = static_cast<long>(std::clamp(a, 0.0, double(counts_[d] - 1)));
    (*hi)[d] = static_cast<long>(std::clamp(b, 0.0, double(counts_[d] - 1)));
  }
  return inside;
}

void IndexedBoxSource::CollectTouching(const Rect& probe,
                                       std::vector<Rect>* out) const {
  if (rects_.empty()) return;
  CheckDims(dim_, probe.dim(), "CollectTouching");
  std::vector<long> lo(dim_), hi(dim_), cur(dim_);
  if (!CellRange(probe, &lo, &hi)) return;
  std::vector<std::size_t> hits;
  cur = lo;
  while (true) {
    long id = 0;
    for (int d = 0; d < dim_; ++d) id += cur[d] * strides_[d];
    for (std::size_t k = cell_start_[id]; k < cell_start_[id + 1]; ++k) {
      hits.push_back(entries_[k]);
    }
    int d = dim_ - 1;
    for (; d >= 0; --d) {
      if (++cur[d] <= hi[d]) break;
      cur[d] = lo[d];
    }
    if (d < 0) break;
  }
  std::sort(hits.begin(), hits.end());
  hits.erase(std::unique(hits.begin(), hits.end()), hits.end());
  for (std::size_t i : hits) {
    if (Touches(probe, rects_[i])) out->push_back(rects_[i]);
  }
}

bool IndexedBoxSource::ContainsPoint(const Vector& y) const {
  if (rects_.empty()) return false;
  CheckDims(dim_, static_cast<int>(y.size()), "ContainsPoint");
  long id = 0;
  for (int d = 0; d < dim_; ++d) {
    const double c = std::floor((y[d] - origin_[d]) / cell_);
    if (c < -1 || c > counts_[d]) return false;
    id += static_cast<long>(std::clamp(c, 0.0, double(counts_[d] - 1))) *
          strides_[d];
  }
  for (std::size_t k = cell_start_[id]; k < cell_start_[id + 1]; ++k) {
    if (Contains(rects_[entries_[k]], y)) return true;
  }
  return false;
}

namespace {

std::vector<Rect> SweepUncovered(const Rect& query,
                                 const std::vector<Rect>& covers,
                                 std::size_t max_fragments) {
  std::vector<Rect> survivors;
  // Depth-first: each stack entry is a fragment plus the index of the next
  // cover box to subtract from it.
  std::vector<std::pair<Rect, std::size_t>> stack;
  stack.emplace_back(query, 0);
  while (!stack.empty()) {
    auto [frag, next] = std::move(stack.back());
    stack.pop_back();
    while (next < covers.size() && !OverlapsSolidly(frag, covers[next])) {
      ++next;
    }
    if (next == covers.size()) {
      survivors.push_back(std::move(frag));
      if (max_fragments != 0 && survivors.size() >= max_fragments) break;
      continue;
    }
    std::vector<Rect> pieces = Subtract(frag, covers[next]);
    for (auto it = pieces.rbegin(); it != pieces.rend(); ++it) {
      stack.emplace_back(std::move(*it), next + 1);
    }
  }
  return survivors;
}

// A query with no extent in some coordinates is handled exactly: only covers
// spanning those coordinates can help, and the rest of the problem lives in
// the solid coordinates alone.
std::vector<Rect> SweepDegenerate(const Rect& query,
                                  const std::vector<Rect>& covers,
                                  std::size_t max_fragments) {
  std::vector<int> solid;
  std::vector<int> flat;
  for (int d = 0; d < query.dim(); ++d) {
    (query.hi[d] - query.lo[d] > kGeomTol ? solid : flat).push_back(d);
  }
  auto project = [&solid](const Rect& r) {
    Vector lo(solid.size());
    Vector hi(solid.size());
    for (std::size_t k = 0; k < solid.size(); ++k) {
      lo[k] = r.lo[solid[k]];
      hi[k] = r.hi[solid[k]];
    }
    return Rect(lo, hi);
  };
  std::vector<Rect> reduced;
  for (const Rect& c : covers) {
    bool spans = true;
    for (int d : flat) {
      if (c.lo[d] > query.lo[d] + kGeomTol || c.hi[d] < query.hi[d] - kGeomTol) {
        spans = false;
        break;
      }
    }
    if (spans) reduced.push_back(project(c));
  }
  if (solid.empty()) {
    return reduced.empty() ? std::vector<Rect>{query} : std::vector<Rect>{};
  }
  std::vector<Rect> out;
  for (const Rect& f : SweepUncovered(project(query), reduced, max_fragments)) {
    Rect lifted = query;
    for (std::size_t k = 0; k < solid.size(); ++k) {
      lifted.lo[solid[k]] = f.lo[k];
      lifted.hi[solid[k]] = f.hi[k];
    }
    out.push_back(std::move(lifted));
  }
  return out;
}

}  // namespace

std::vector<Rect> UncoveredFragments(const Rect& query,
                                     const CoverageSource& source,
                                     std::size_t max_fragments) {
  std::vector<Rect> covers;
  source.CollectTouching(query, &covers);
  return query.IsSolid() ? SweepUncovered(query, covers, max_fragments)
                         : SweepDegenerate(query, covers, max_fragments);
}

CoverageClass ClassifyCoverage(const Rect& query,
                               const CoverageSource& source) {
  std::vector<Rect> covers;
  source.CollectTouching(query, &covers);
  if (covers.empty()) return CoverageClass::kDisjoint;
  const std::vector<Rect> gaps = query.IsSolid()
                                     ? SweepUncovered(query, covers, 1)
                                     : SweepDegenerate(query, covers, 1);
  return gaps.empty() ? CoverageClass::kFullyCovered : CoverageClass::kPartial;
}

CoverageClass ClassifyCoverage(const Box& query,
                               const CoverageSource& source) {
  return ClassifyCoverage(Rect(query), source);
}

Box SuccessorBox(const Vector& x_plus, double r, double lipschitz) {
  if (!(lipschitz > 0.0)) {
    throw std::invalid_argument("SuccessorBox: Lipschitz bound must be > 0");
  }
  if (!(r >= 0.0)) {
    throw std::invalid_argument("SuccessorBox: radius must be >= 0");
  }
  return Box(x_plus, lipschitz * r);
}

BoxList CubesFromBounds(const Vector& lo, const Vector& hi) {
  CheckDims(static_cast<int>(lo.size()), static_cast<int>(hi.size()),
            "CubesFromBounds");
  const int n = static_cast<int>(lo.size());
  if (n == 0) throw std::invalid_argument("domain has dimension 0");
  Vector sides = hi - lo;
  if (!(sides.minCoeff() > 0.0)) {
    throw std::invalid_argument("domain must have positive extent");
  }
  const double min_side = sides.minCoeff();
  for (int k = 1; k <= 64; ++k) {
    const double side = min_side / k;
    std::vector<long> counts(n);
    bool ok = true;
    for (int i = 0; i < n && ok; ++i) {
      const double q = sides[i] / side;
      counts[i] = std::lround(q);
      ok = std::abs(q - counts[i]) <= 1e-9 * std::max(1.0, q);
    }
    if (!ok) continue;
    long total = 1;
    for (long c : counts) total *= c;
    BoxList cubes;
    cubes.reserve(total);
    std::vector<long> idx(n, 0);
    for (long t = 0; t < total; ++t) {
      Vector center(n);
      for (int i = 0; i < n; ++i) {
        center[i] = lo[i] + side * (static_cast<double>(idx[i]) + 0.5);
      }
      cubes.emplace_back(std::move(center), side / 2.0);
      // Row-major: last coordinate fastest.
      for (int i = n - 1; i >= 0; --i) {
        if (++idx[i] < counts[i]) break;
        idx[i] = 0;
      }
    }
    return cubes;
  }
  throw std::invalid_argument(
      "domain is not expressible as a union of equal cubes");
}

BoxList ParseDomain(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) {
    throw std::invalid_argument("domain must look like 'lo1,lo2:hi1,hi2'");
  }
  const std::vector<double> lo = SplitNumbers(spec.substr(0, colon));
  const std::vector<double> hi = SplitNumbers(spec.substr(colon + 1));
  if (lo.empty() || lo.size() != hi.size()) {
    throw std::invalid_argument("domain bounds have mismatched lengths");
  }
  return CubesFromBounds(
      Eigen::Map<const Vector>(lo.data(), static_cast<long>(lo.size())),
      Eigen::Map<const Vector>(hi.data(), static_cast<long>(hi.size())));
}

bool InUnion(const BoxList& boxes, const Vector& y) {
  return std::any_of(boxes.begin(), boxes.end(),
                     [&](const Box& b) { return Contains(b, y); });
}

Rect BoundingRect(const BoxList& boxes) {
  if (boxes.empty()) throw std::invalid_argument("BoundingRect: empty list");
  Rect out(boxes.front());
  for (const Box& b : boxes) {
    const Rect r(b);
    out.lo = out.lo.cwiseMin(r.lo);
    out.hi = out.hi.cwiseMax(r.hi);
  }
  return out;
}

}  // namespace pisynth
