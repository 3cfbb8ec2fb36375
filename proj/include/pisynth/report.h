#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "pisynth/result_io.h"

namespace pisynth {

/// The fields of one result file that the report aggregates.
struct RunSummary {
  std::string path;
  std::string system;
  std::size_t samples{0};
  double tau{0.0};
  double volume{0.0};
  bool empty{true};
  bool certified{false};
};

RunSummary Summarize(const ResultDocument& doc, const std::string& path = "");

/// Volume statistics for one (system, M, tau) group. Quartiles use linear
/// interpolation between order statistics.
struct ReportRow {
  std::string system;
  std::size_t samples{0};
  double tau{0.0};
  std::size_t runs{0};
  std::size_t empty_runs{0};
  std::size_t certified_runs{0};
  double min{0.0};
  double q1{0.0};
  double median{0.0};
  double q3{0.0};
  double max{0.0};
  double mean{0.0};
};

/// Linear-interpolation quantile of an unsorted sample; q in [0, 1].
/// Throws std::invalid_argument on an empty sample.
double Quantile(std::vector<double> values, double q);

/// Groups runs by (system, M, tau), sorted by that key.
std::vector<ReportRow> Aggregate(const std::vector<RunSummary>& runs);

/// Loads every *.json file directly inside `dir`, in file-name order.
/// Throws std::runtime_error when the directory holds no result files.
std::vector<RunSummary> ScanResults(const std::string& dir);

std::string ReportCsv(const std::vector<ReportRow>& rows);

}  // namespace pisynth
