#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "pisynth/geometry.h"

namespace pisynth {

/// A sampled state and its successor x⁺ = T(x).
struct SamplePair {
  Vector x;
  Vector x_plus;
};

/// Discrete-time map x⁺ = T(x) with a trusted max-norm Lipschitz bound.
struct SystemOracle {
  std::string name;
  int dim{0};
  double lipschitz{0.0};
  /// Domain the system is usually studied on, in ParseDomain syntax. May be
  /// empty for user-supplied maps.
  std::string default_domain;
  std::function<Vector(const Vector&)> map;

  Vector operator()(const Vector& x) const { return map(x); }
};

/// x⁺ = A x with A = [0.2200 0.4013; −0.5364 0.2109], L = 0.8225,
/// X = [−0.25, 1] × [−1, 0.25].
SystemOracle Linear2d();

/// x1⁺ = 0.5 x1 − 0.7 x2², x2⁺ = 0.9 x2³ + x1 x2, L = 5.728, X = [−1, 1]².
SystemOracle Nonlinear2d();

/// x⁺ = A x for a user matrix; the Lipschitz bound defaults to ‖A‖∞.
SystemOracle LinearSystem(const Eigen::MatrixXd& a, double lipschitz = 0.0);

/// Looks up "linear2d" or "nonlinear2d". Throws std::invalid_argument for
/// anything else.
SystemOracle BuiltinSystem(const std::string& name);

/// Parses "a11,a12;a21,a22" (rows separated by ';').
Eigen::MatrixXd ParseMatrix(const std::string& text);

struct NearestResult {
  std::size_t index{0};
  double distance{0.0};
};

/// Exact max-norm nearest neighbour over a fixed point set using uniform grid
/// buckets and ring expansion. Ties go to the lowest point index.
class MaxNormGridIndex {
 public:
  MaxNormGridIndex() = default;
  explicit MaxNormGridIndex(std::vector<Vector> points);

  NearestResult Nearest(const Vector& q) const;

  double cell_size() const { return cell_; }

 private:
  void ScanCell(long cell, const Vector& q, NearestResult* best) const;

  std::vector<Vector> points_;
  int dim_{0};
  Vector origin_;
  double cell_{1.0};
  std::vector<long> counts_;
  std::vector<long> strides_;
  std::vector<std::size_t> cell_start_;
  std::vector<std::size_t> order_;
};

/// The pre-collected data D = {x_j, x_j⁺}. Immutable once built.
class Dataset {
 public:
  Dataset(std::vector<SamplePair> pairs,
          std::map<std::string, std::string> metadata = {});

  int dim() const { return dim_; }
  std::size_t size() const { return pairs_.size(); }
  const SamplePair& operator[](std::size_t i) const { return pairs_[i]; }
  const std::vector<SamplePair>& pairs() const { return pairs_; }
  const std::map<std::string, std::string>& metadata() const {
    return metadata_;
  }

  /// Indexed exact nearest neighbour of q among the states x_j.
  NearestResult Nearest(const Vector& q) const;
  /// Reference linear scan with the same tie rule.
  NearestResult NearestLinearScan(const Vector& q) const;

 private:
  int dim_{0};
  std::vector<SamplePair> pairs_;
  std::map<std::string, std::string> metadata_;
  MaxNormGridIndex index_;
};

class DatasetError : public std::runtime_error {
 public:
  enum class Code { kIo = 1, kMalformedRow, kDimension, kEmpty };

  DatasetError(Code code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  Code code() const { return code_; }

 private:
  Code code_;
};

struct LoadOptions {
  /// Declared state dimension; 0 infers it from the first data row.
  int dim{0};
  /// When nonempty, rows whose state lies outside this union are dropped.
  BoxList domain;
};

struct LoadReport {
  /// 1-based line numbers of rows rejected for lying outside the domain.
  std::vector<std::size_t> rejected_lines;
};

/// Reads the CSV schema "x_1,...,x_n,xp_1,...,xp_n". '#' lines are comments;
/// "# key=value" comments become metadata. A non-numeric first row is
/// treated as a header.
Dataset LoadDataset(const std::string& path, const LoadOptions& options = {},
                    LoadReport* report = nullptr);
Dataset ReadDataset(std::istream& in, const LoadOptions& options = {},
                    LoadReport* report = nullptr);

void WriteDataset(std::ostream& out, const Dataset& data);
void SaveDataset(const std::string& path, const Dataset& data);

/// M states drawn i.i.d. uniformly over the domain, successors from the
/// oracle. Deterministic for a fixed seed.
Dataset GenerateUniform(const SystemOracle& oracle, const BoxList& domain,
                        std::size_t m, std::uint64_t seed);

/// One sample at every subdivision target centre of every root box, for all
/// levels whose target radius is ≥ tau (the root level is always included).
Dataset GenerateDyadicGrid(const SystemOracle& oracle, const BoxList& domain,
                           double tau);

/// 64-bit FNV-1a of a byte string; used for dataset fingerprints.
std::uint64_t Fnv1a64(const std::string& bytes);

}  // namespace pisynth
