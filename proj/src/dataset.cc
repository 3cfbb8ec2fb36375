#include "pisynth/dataset.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <utility>

namespace pisynth {
namespace {

std::string_view Trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool ParseDouble(std::string_view text, double* out) {
  text = Trim(text);
  if (text.empty()) return false;
  if (text.front() == '+') text.remove_prefix(1);
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, *out);
  return ec == std::errc() && ptr == end && std::isfinite(*out);
}

// Splits a CSV row; returns false if any field is not a finite number.
bool ParseRow(std::string_view line, std::vector<double>* values) {
  values->clear();
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    double v = 0.0;
    if (!ParseDouble(line.substr(start, comma - start), &v)) return false;
    values->push_back(v);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return true;
}

std::string FormatDouble(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

SystemOracle Linear2d() {
  Eigen::Matrix2d a;
  a << 0.2200, 0.4013, -0.5364, 0.2109;
  SystemOracle oracle = LinearSystem(a, 0.8225);
  oracle.name = "linear2d";
  oracle.default_domain = "-0.25,-1:1,0.25";
  return oracle;
}

SystemOracle Nonlinear2d() {
  SystemOracle oracle;
  oracle.name = "nonlinear2d";
  oracle.dim = 2;
  oracle.lipschitz = 5.728;
  oracle.default_domain = "-1,-1:1,1";
  oracle.map = [](const Vector& x) {
    Vector y(2);
    y[0] = 0.5 * x[0] - 0.7 * x[1] * x[1];
    y[1] = 0.9 * x[1] * x[1] * x[1] + x[0] * x[1];
    return y;
  };
  return oracle;
}

SystemOracle LinearSystem(const Eigen::MatrixXd& a, double lipschitz) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw std::invalid_argument("system matrix must be square and nonempty");
  }
  SystemOracle oracle;
  oracle.name = "linear";
  oracle.dim = static_cast<int>(a.rows());
  // Induced ∞-norm: maximum absolute row sum.
  const double row_norm = a.cwiseAbs().rowwise().sum().maxCoeff();
  oracle.lipschitz = lipschitz > 0.0 ? lipschitz : row_norm;
  if (!(oracle.lipschitz > 0.0)) {
    throw std::invalid_argument("zero matrix has no positive Lipschitz bound");
  }
  oracle.map = [a](const Vector& x) -> Vector { return a * x; };
  return oracle;
}

SystemOracle BuiltinSystem(const std::string& name) {
  if (name == "linear2d") return Linear2d();
  if (name == "nonlinear2d") return Nonlinear2d();
  throw std::invalid_argument("unknown system '" + name + "'");
}

Eigen::MatrixXd ParseMatrix(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::stringstream in(text);
  std::string row;
  std::vector<double> values;
  while (std::getline(in, row, ';')) {
    if (!ParseRow(row, &values)) {
      throw std::invalid_argument("bad matrix row '" + row + "'");
    }
    rows.push_back(values);
  }
  if (rows.empty()) throw std::invalid_argument("empty matrix");
  Eigen::MatrixXd a(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.front().size()) {
      throw std::invalid_argument("ragged matrix");
    }
    for (std::size_t j = 0; j < rows[i].size(); ++j) a(i, j) = rows[i][j];
  }
  return a;
}

MaxNormGridIndex::MaxNormGridIndex(std::vector<Vector> points)
    : points_(std::move(points)) {
  if (points_.empty()) return;
  dim_ = static_cast<int>(points_.front().size());
  origin_ = points_.front();
  Vector top = points_.front();
  for (const Vector& p : points_) {
    origin_ = origin_.cwiseMin(p);
    top = top.cwiseMax(p);
  }
  const double extent = std::max((top - origin_).maxCoeff(), 1e-9);
  // Aim for a handful of points per cell, capped at ~4M cells.
  const double per_axis = std::max(
      1.0, std::floor(std::pow(points_.size() / 2.0, 1.0 / dim_)));
  const double capped = std::min(per_axis, std::pow(4.0e6, 1.0 / dim_));
  cell_ = extent / std::max(1.0, capped);

  counts_.resize(dim_);
  strides_.resize(dim_);
  long total = 1;
  for (int d = dim_ - 1; d >= 0; --d) {
    counts_[d] =
        static_cast<long>(std::floor((top[d] - origin_[d]) / cell_)) + 1;
    strides_[d] = total;
    total *= counts_[d];
  }
  std::vector<long> cell_of(points_.size());
  std::vector<std::size_t> per_cell(total + 1, 0);
  for (std::size_t i = 0; i < points_.size(); ++i) {
    long id = 0;
    for (int d = 0; d < dim_; ++d) {
      long c = static_cast<long>(std::floor((points_[i][d] - origin_[d]) / cell_));
      c = std::clamp(c, 0L, counts_[d] - 1);
      id += c * strides_[d];
    }
    cell_of[i] = id;
    ++per_cell[id + 1];
  }
  std::partial_sum(per_cell.begin(), per_cell.end(), per_cell.begin());
  cell_start_ = per_cell;
  order_.resize(points_.size());
  // Filling in index order keeps each bucket sorted by point index.
  for (std::size_t i = 0; i < points_.size(); ++i) {
    order_[per_cell[cell_of[i]]++] = i;
  }
}

void MaxNormGridIndex::ScanCell(long cell, const Vector& q,
                                NearestResult* best) const {
  for (std::size_t k = cell_start_[cell]; k < cell_start_[cell + 1]; ++k) {
    const std::size_t i = order_[k];
    const double dist = (points_[i] - q).cwiseAbs().maxCoeff();
    if (dist < best->distance ||
        (dist == best->distance && i < best->index)) {
      best->distance = dist;
      best->index = i;
    }
  }
}

NearestResult MaxNormGridIndex::Nearest(const Vector& q) const {
  if (points_.empty()) throw std::logic_error("Nearest on empty index");
  if (static_cast<int>(q.size()) != dim_) {
    throw std::invalid_argument("Nearest: dimension mismatch");
  }
  std::vector<long> home(dim_);
  for (int d = 0; d < dim_; ++d) {
    const long c = static_cast<long>(std::floor((q[d] - origin_[d]) / cell_));
    home[d] = std::clamp(c, 0L, counts_[d] - 1);
  }
  NearestResult best{std::numeric_limits<std::size_t>::max(),
                     std::numeric_limits<double>::infinity()};
  std::vector<long> lo(dim_), hi(dim_), cur(dim_);
  for (long ring = 0;; ++ring) {
    bool whole_grid = true;
    for (int d = 0; d < dim_; ++d) {
      lo[d] = std::max(0L, home[d] - ring);
      hi[d] = std::min(counts_[d] - 1, home[d] + ring);
      whole_grid = whole_grid && lo[d] == 0 && hi[d] == counts_[d] - 1;
    }
    // Visit the cells of the block whose Chebyshev offset is exactly `ring`.
    cur = lo;
    while (true) {
      long offset = 0;
      long id = 0;
      for (int d = 0; d < dim_; ++d) {
        offset = std::max(offset, std::abs(cur[d] - home[d]));
        id += cur[d] * strides_[d];
      }
      if (offset == ring) ScanCell(id, q, &best);
      int d = dim_ - 1;
      for (; d >= 0; --d) {
        if (++cur[d] <= hi[d]) break;
        cur[d] = lo[d];
      }
      if (d < 0) break;
    }
    if (whole_grid) break;
    // Any point outside the block lies beyond one of its interior faces.
    double bound = std::numeric_limits<double>::infinity();
    for (int d = 0; d < dim_; ++d) {
      if (lo[d] > 0) bound = std::min(bound, q[d] - (origin_[d] + lo[d] * cell_));
      if (hi[d] < counts_[d] - 1) {
        bound = std::min(bound, origin_[d] + (hi[d] + 1) * cell_ - q[d]);
      }
    }
    if (best.distance < bound - 1e-9 * cell_) break;
  }
  return best;
}

Dataset::Dataset(std::vector<SamplePair> pairs,
                 std::map<std::string, std::string> metadata)
    : pairs_(std::move(pairs)), metadata_(std::move(metadata)) {
  if (pairs_.empty()) {
    throw DatasetError(DatasetError::Code::kEmpty, "dataset is empty");
  }
  dim_ = static_cast<int>(pairs_.front().x.size());
  std::vector<Vector> states;
  states.reserve(pairs_.size());
  for (const SamplePair& p : pairs_) {
    if (p.x.size() != dim_ || p.x_plus.size() != dim_) {
      throw DatasetError(DatasetError::Code::kDimension,
                         "sample pairs have inconsistent dimensions");
    }
    states.push_back(p.x);
  }
  index_ = MaxNormGridIndex(std::move(states));
}

NearestResult Dataset::Nearest(const Vector& q) const {
  return index_.Nearest(q);
}

NearestResult Dataset::NearestLinearScan(const Vector& q) const {
  if (q.size() != dim_) {
    throw std::invalid_argument("Nearest: dimension mismatch");
  }
  NearestResult best{0, std::numeric_limits<double>::infinity()};
  for (std::size_t i = 0; i < pairs_.size(); ++i) {
    const double dist = (pairs_[i].x - q).cwiseAbs().maxCoeff();
    if (dist < best.distance) best = {i, dist};
  }
  return best;
}

Dataset ReadDataset(std::istream& in, const LoadOptions& options,
                    LoadReport* report) {
  std::map<std::string, std::string> metadata;
  std::vector<SamplePair> pairs;
  std::vector<double> values;
  int dim = options.dim;
  bool seen_data = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view body = Trim(line);
    if (body.empty()) continue;
    if (body.front() == '#') {
      const std::string_view kv = Trim(body.substr(1));
      const auto eq = kv.find('=');
      if (eq != std::string_view::npos) {
        metadata[std::string(Trim(kv.substr(0, eq)))] =
            std::string(Trim(kv.substr(eq + 1)));
      }
      continue;
    }
    if (!ParseRow(body, &values)) {
      if (!seen_data && std::isalpha(static_cast<unsigned char>(body.front()))) {
        seen_data = true;  // header row
        continue;
      }
      throw DatasetError(DatasetError::Code::kMalformedRow,
                         "malformed row at line " + std::to_string(line_no));
    }
    seen_data = true;
    if (dim == 0) {
      if (values.size() % 2 != 0) {
        throw DatasetError(DatasetError::Code::kDimension,
                           "odd column count at line " +
                               std::to_string(line_no));
      }
      dim = static_cast<int>(values.size() / 2);
    }
    if (values.size() != 2 * static_cast<std::size_t>(dim)) {
      throw DatasetError(DatasetError::Code::kDimension,
                         "expected " + std::to_string(2 * dim) +
                             " columns at line " + std::to_string(line_no) +
                             ", got " + std::to_string(values.size()));
    }
    SamplePair p{Eigen::Map<const Vector>(values.data(), dim),
                 Eigen::Map<const Vector>(values.data() + dim, dim)};
    if (!options.domain.empty() && !InUnion(options.domain, p.x)) {
      if (report != nullptr) report->rejected_lines.push_back(line_no);
      continue;
    }
    pairs.push_back(std::move(p));
  }
  if (in.bad()) throw DatasetError(DatasetError::Code::kIo, "read failed");
  if (pairs.empty()) {
    throw DatasetError(DatasetError::Code::kEmpty, "dataset has no rows");
  }
  return Dataset(std::move(pairs), std::move(metadata));
}

Dataset LoadDataset(const std::string& path, const LoadOptions& options,
                    LoadReport* report) {
  std::ifstream in(path);
  if (!in) throw DatasetError(DatasetError::Code::kIo, "cannot open " + path);
  return ReadDataset(in, options, report);
}

void WriteDataset(std::ostream& out, const Dataset& data) {
  for (const auto& [key, value] : data.metadata()) {
    out << "# " << key << "=" << value << "\n";
  }
  const int n = data.dim();
  for (int i = 0; i < n; ++i) out << "x" << i + 1 << ",";
  for (int i = 0; i < n; ++i) out << "xp" << i + 1 << (i + 1 < n ? "," : "\n");
  std::string row;
  for (const SamplePair& p : data.pairs()) {
    row.clear();
    for (int i = 0; i < n; ++i) row += FormatDouble(p.x[i]) + ",";
    for (int i = 0; i < n; ++i) {
      row += FormatDouble(p.x_plus[i]);
      row += (i + 1 < n ? ',' : '\n');
    }
    out << row;
  }
}

void SaveDataset(const std::string& path, const Dataset& data) {
  std::ofstream out(path);
  if (!out) throw DatasetError(DatasetError::Code::kIo, "cannot write " + path);
  WriteDataset(out, data);
  if (!out) throw DatasetError(DatasetError::Code::kIo, "write failed " + path);
}

Dataset GenerateUniform(const SystemOracle& oracle, const BoxList& domain,
                        std::size_t m, std::uint64_t seed) {
  if (m == 0) throw std::invalid_argument("GenerateUniform: M must be >= 1");
  if (domain.empty()) throw std::invalid_argument("GenerateUniform: no domain");
  std::mt19937_64 rng(seed);
  std::vector<double> weights;
  for (const Box& b : domain) weights.push_back(Volume(b));
  std::discrete_distribution<std::size_t> pick_root(weights.begin(),
                                                    weights.end());
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<SamplePair> pairs;
  pairs.reserve(m);
  for (std::size_t j = 0; j < m; ++j) {
    const Box& root = domain.size() == 1 ? domain.front() : domain[pick_root(rng)];
    Vector x(root.dim());
    for (int d = 0; d < root.dim(); ++d) {
      x[d] = root.center[d] + root.radius * unit(rng);
    }
    Vector xp = oracle(x);
    pairs.push_back({std::move(x), std::move(xp)});
  }
  std::map<std::string, std::string> meta{
      {"system", oracle.name},
      {"mode", "uniform"},
      {"seed", std::to_string(seed)},
      {"M", std::to_string(m)},
      {"L", FormatDouble(oracle.lipschitz)}};
  return Dataset(std::move(pairs), std::move(meta));
}

Dataset GenerateDyadicGrid(const SystemOracle& oracle, const BoxList& domain,
                           double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("GenerateDyadicGrid: tau <= 0");
  if (domain.empty()) throw std::invalid_argument("GenerateDyadicGrid: no domain");
  std::vector<SamplePair> pairs;
  for (const Box& root : domain) {
    const int n = root.dim();
    const Vector lo = root.center.array() - root.radius;
    for (int level = 0;; ++level) {
      const double r = std::ldexp(root.radius, -level);
      if (level > 0 && r < tau) break;
      const long per_axis = 1L << level;
      std::vector<long> idx(n, 0);
      while (true) {
        Vector x(n);
        for (int d = 0; d < n; ++d) x[d] = lo[d] + r * (2.0 * idx[d] + 1.0);
        Vector xp = oracle(x);
        pairs.push_back({std::move(x), std::move(xp)});
        int d = n - 1;
        for (; d >= 0; --d) {
          if (++idx[d] < per_axis) break;
          idx[d] = 0;
        }
        if (d < 0) break;
      }
    }
  }
  std::map<std::string, std::string> meta{
      {"system", oracle.name},
      {"mode", "grid"},
      {"tau", FormatDouble(tau)},
      {"M", std::to_string(pairs.size())},
      {"L", FormatDouble(oracle.lipschitz)}};
  return Dataset(std::move(pairs), std::move(meta));
}

std::uint64_t Fnv1a64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace pisynth
