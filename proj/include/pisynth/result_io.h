#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include "json.hpp"

#include "pisynth/synthesis.h"
#include "pisynth/verify.h"

namespace pisynth {

inline constexpr const char* kToolVersion = "0.1.0";

/// Provenance embedded in every result file.
struct RunManifest {
  std::string command;
  std::string dataset_path;
  /// FNV-1a 64 of the dataset file bytes, as 16 hex digits.
  std::string dataset_fingerprint;
  /// Generator metadata carried by the dataset (system, seed, M, L, ...).
  std::map<std::string, std::string> dataset_metadata;
  std::string tool_version{kToolVersion};
  double duration_seconds{0.0};
};

struct ResultDocument {
  RunManifest manifest;
  SynthResult result;
  std::optional<Certificate> certificate;
};

class ResultFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sections: manifest, config, tree (flat node table), pi_set, volume,
/// sweeps, leaf_counts, terminated_by, certificate.
nlohmann::json ToJson(const ResultDocument& doc);
nlohmann::json ToJson(const Certificate& cert);

/// Throws ResultFormatError on a missing or ill-typed field or an
/// inconsistent node table.
ResultDocument FromJson(const nlohmann::json& j);

void SaveResult(const std::string& path, const ResultDocument& doc);
/// Throws std::runtime_error when the file cannot be read and
/// ResultFormatError when it does not parse.
ResultDocument LoadResult(const std::string& path);

std::string FingerprintHex(const std::string& bytes);

}  // namespace pisynth
