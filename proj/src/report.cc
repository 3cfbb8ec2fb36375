#include "pisynth/report.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace pisynth {

RunSummary Summarize(const ResultDocument& doc, const std::string& path) {
  RunSummary s;
  s.path = path;
  const auto& meta = doc.manifest.dataset_metadata;
  auto system = meta.find("system");
  s.system = system == meta.end() ? "unknown" : system->second;
  auto m = meta.find("M");
  s.samples = m == meta.end() ? 0 : std::stoull(m->second);
  s.tau = doc.result.config.tau;
  s.volume = doc.result.volume;
  s.empty = doc.result.pi_set.empty();
  s.certified = doc.certificate && doc.certificate->passed;
  return s;
}

double Quantile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("quantile of empty sample");
  std::sort(values.begin(), values.end());
  const double pos = q * (values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - lo) * (values[hi] - values[lo]);
}

std::vector<ReportRow> Aggregate(const std::vector<RunSummary>& runs) {
  using Key = std::tuple<std::string, std::size_t, double>;
  std::map<Key, std::vector<const RunSummary*>> groups;
  for (const RunSummary& r : runs) {
    groups[{r.system, r.samples, r.tau}].push_back(&r);
  }
  std::vector<ReportRow> rows;
  for (const auto& [key, members] : groups) {
    ReportRow row;
    std::tie(row.system, row.samples, row.tau) = key;
    std::vector<double> volumes;
    for (const RunSummary* r : members) {
      volumes.push_back(r->volume);
      row.empty_runs += r->empty;
      row.certified_runs += r->certified;
    }
    row.runs = volumes.size();
    row.min = Quantile(volumes, 0.0);
    row.q1 = Quantile(volumes, 0.25);
    row.median = Quantile(volumes, 0.5);
    row.q3 = Quantile(volumes, 0.75);
    row.max = Quantile(volumes, 1.0);
    row.mean = std::accumulate(volumes.begin(), volumes.end(), 0.0) /
               volumes.size();
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<RunSummary> ScanResults(const std::string& dir) {
  namespace fs = std::filesystem;
  std::vector<fs::path> files;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      files.push_back(entry.path());
    }
  }
  if (ec) throw std::runtime_error("cannot list " + dir + ": " + ec.message());
  if (files.empty()) throw std::runtime_error("no result files in " + dir);
  std::sort(files.begin(), files.end());
  std::vector<RunSummary> runs;
  for (const fs::path& f : files) {
    runs.push_back(Summarize(LoadResult(f.string()), f.string()));
  }
  return runs;
}

std::string ReportCsv(const std::vector<ReportRow>& rows) {
  std::ostringstream out;
  out.precision(10);
  out << "system,M,tau,runs,empty,certified,min,q1,median,q3,max,mean\n";
  for (const ReportRow& r : rows) {
    out << r.system << ',' << r.samples << ',' << r.tau << ',' << r.runs << ','
        << r.empty_runs << ',' << r.certified_runs << ',' << r.min << ','
        << r.q1 << ',' << r.median << ',' << r.q3 << ',' << r.max << ','
        << r.mean << '\n';
  }
  return out.str();
}

}  // namespace pisynth
