#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include "pisynth/bounds.h"
#include "pisynth/geometry.h"

namespace pisynth {
namespace testing {

/// A coverage query whose every box edge lies on a lattice of spacing
/// `kLattice`. Rasterizing at a cell that divides the lattice spacing samples
/// only cell centres, which never sit on a lattice line, so the raster count
/// is exact and any boundary is at least half a cell away from every sample.
struct CoverageInstance {
  Box query;
  BoxList cover;
};

inline constexpr double kLattice = 0.05;

inline double LatticeValue(std::mt19937_64& rng, int lo, int hi) {
  return kLattice * std::uniform_int_distribution<int>(lo, hi)(rng);
}

/// Mixes three regimes so that all three verdicts occur often: scattered
/// boxes near the query, a near-complete tiling of a region around it, and a
/// single large box that may or may not swallow it.
inline CoverageInstance RandomLatticeInstance(std::mt19937_64& rng, int n,
                                              int max_query_steps) {
  CoverageInstance inst;
  Vector c(n);
  for (int d = 0; d < n; ++d) c[d] = LatticeValue(rng, -4, 4);
  inst.query = Box(c, LatticeValue(rng, 1, max_query_steps));
  const int regime = std::uniform_int_distribution<int>(0, 2)(rng);
  if (regime == 0) {
    const int count = std::uniform_int_distribution<int>(1, 8)(rng);
    for (int k = 0; k < count; ++k) {
      Vector bc(n);
      for (int d = 0; d < n; ++d) {
        bc[d] = c[d] + LatticeValue(rng, -2 * max_query_steps, 2 * max_query_steps);
      }
      inst.cover.emplace_back(bc, LatticeValue(rng, 1, max_query_steps));
    }
  } else if (regime == 1) {
    // Tile a cube slightly larger than the query with cubes of one size and
    // drop each tile with small probability.
    const double tile = kLattice * std::uniform_int_distribution<int>(1, 2)(rng);
    const double reach = inst.query.radius + 2.0 * tile;
    const int per_axis = static_cast<int>(std::lround(reach / tile));
    std::bernoulli_distribution drop(0.04);
    std::vector<int> idx(n, -per_axis);
    while (true) {
      Vector tc(n);
      for (int d = 0; d < n; ++d) tc[d] = c[d] + tile * (2 * idx[d] + 1);
      if (!drop(rng)) inst.cover.emplace_back(tc, tile);
      int d = 0;
      for (; d < n; ++d) {
        if (++idx[d] < per_axis) break;
        idx[d] = -per_axis;
      }
      if (d == n) break;
    }
  } else {
    Vector bc(n);
    for (int d = 0; d < n; ++d) {
      bc[d] = c[d] + LatticeValue(rng, -max_query_steps, max_query_steps);
    }
    inst.cover.emplace_back(bc, LatticeValue(rng, max_query_steps,
                                             3 * max_query_steps));
  }
  return inst;
}

/// True when every cover box either overlaps the query with positive volume
/// or stays more than `margin` away from it in some coordinate. Boxes that
/// only graze the query's boundary make the closed-set verdict differ from
/// any raster on a set of measure zero.
inline bool MarginSeparated(const CoverageInstance& inst, double margin) {
  const Rect q(inst.query);
  for (const Box& b : inst.cover) {
    const Rect r(b);
    if (OverlapsSolidly(q, r)) continue;
    bool far = false;
    for (int d = 0; d < q.dim(); ++d) {
      far = far || r.lo[d] > q.hi[d] + margin || r.hi[d] < q.lo[d] - margin;
    }
    if (!far) return false;
  }
  return true;
}

/// Draws lattice instances until one is margin separated.
inline CoverageInstance RandomSeparatedInstance(std::mt19937_64& rng, int n,
                                                int max_query_steps,
                                                double margin) {
  while (true) {
    CoverageInstance inst = RandomLatticeInstance(rng, n, max_query_steps);
    if (MarginSeparated(inst, margin)) return inst;
  }
}

/// A random bounded polytope: the unit max-ball rows, randomly rescaled, plus
/// a few random extra half-spaces.
inline PolytopeCSet RandomCSet(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> scale(0.5, 2.0);
  const int extra = 3;
  Eigen::MatrixXd rows(2 * n + extra, n);
  for (int i = 0; i < n; ++i) {
    rows.row(2 * i) = Eigen::RowVectorXd::Unit(n, i) * scale(rng);
    rows.row(2 * i + 1) = -Eigen::RowVectorXd::Unit(n, i) * scale(rng);
  }
  for (int k = 0; k < extra; ++k) {
    for (int d = 0; d < n; ++d) rows(2 * n + k, d) = u(rng);
  }
  return PolytopeCSet(rows);
}

/// A fresh empty directory under the system temp dir.
inline std::filesystem::path FreshTempDir(const std::string& name) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / ("pisynth_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace testing
}  // namespace pisynth
