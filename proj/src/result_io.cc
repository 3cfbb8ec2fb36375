#include "pisynth/result_io.h"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <utility>
#include <vector>

namespace pisynth {
namespace {

using nlohmann::json;

json VecToJson(const Vector& v) {
  json arr = json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Vector VecFromJson(const json& j, int dim, const char* what) {
  if (!j.is_array() || static_cast<int>(j.size()) != dim) {
    throw ResultFormatError(std::string(what) + ": expected array of length " +
                            std::to_string(dim));
  }
  Vector v(dim);
  for (int i = 0; i < dim; ++i) v[i] = j[i].get<double>();
  return v;
}

json BoxToJson(const Box& b) {
  return {{"center", VecToJson(b.center)}, {"radius", b.radius}};
}

Label LabelFromInt(int v) {
  switch (v) {
    case 1:
      return Label::kIncluded;
    case 0:
      return Label::kExcluded;
    case -1:
      return Label::kUnknown;
  }
  throw ResultFormatError("invalid label " + std::to_string(v));
}

Termination ParseTermination(const std::string& s) {
  if (s == "fixpoint") return Termination::kFixpoint;
  if (s == "safeguard") return Termination::kSafeguard;
  throw ResultFormatError("invalid terminated_by '" + s + "'");
}

CertMethod ParseMethod(const std::string& s) {
  if (s == "exact_coverage") return CertMethod::kExactCoverage;
  if (s == "raster") return CertMethod::kRaster;
  if (s == "monte_carlo") return CertMethod::kMonteCarlo;
  throw ResultFormatError("invalid certificate method '" + s + "'");
}

Certificate CertificateFromJson(const json& j, int dim) {
  Certificate cert;
  cert.method = ParseMethod(j.at("method").get<std::string>());
  cert.passed = j.at("passed").get<bool>();
  cert.checked_leaves = j.at("checked_leaves").get<std::size_t>();
  if (j.contains("failure") && !j["failure"].is_null()) {
    const json& f = j["failure"];
    CertFailure failure;
    failure.leaf_id = f.at("leaf_id").get<int>();
    failure.reason = f.at("reason").get<std::string>();
    if (f.contains("uncovered") && !f["uncovered"].is_null()) {
      failure.uncovered = Rect(VecFromJson(f["uncovered"].at("lo"), dim, "lo"),
                               VecFromJson(f["uncovered"].at("hi"), dim, "hi"));
    }
    cert.first_failure = std::move(failure);
  }
  return cert;
}

}  // namespace

std::string FingerprintHex(const std::string& bytes) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(Fnv1a64(bytes)));
  return buf;
}

json ToJson(const Certificate& cert) {
  json j = {{"method", ToString(cert.method)},
            {"passed", cert.passed},
            {"checked_leaves", cert.checked_leaves},
            {"failure", nullptr}};
  if (cert.first_failure) {
    const CertFailure& f = *cert.first_failure;
    json failure = {{"leaf_id", f.leaf_id}, {"reason", f.reason},
                    {"uncovered", nullptr}};
    if (f.uncovered) {
      failure["uncovered"] = {{"lo", VecToJson(f.uncovered->lo)},
                              {"hi", VecToJson(f.uncovered->hi)}};
    }
    j["failure"] = std::move(failure);
  }
  return j;
}

json ToJson(const ResultDocument& doc) {
  const SynthResult& r = doc.result;
  json nodes = json::array();
  const auto& table = r.tree.nodes();
  for (std::size_t id = 0; id < table.size(); ++id) {
    const TreeNode& n = table[id];
    nodes.push_back({{"id", id},
                     {"parent", n.parent},
                     {"first_child", n.first_child},
                     {"child_count", n.child_count},
                     {"target_radius", n.target_radius},
                     {"target_center", VecToJson(n.target_center)},
                     {"sample_radius", n.sample_radius},
                     {"sample_index", n.sample_index},
                     {"x", VecToJson(n.sample.x)},
                     {"x_plus", VecToJson(n.sample.x_plus)},
                     {"label", static_cast<int>(n.label)}});
  }
  json pi_set = json::array();
  for (const Box& b : r.pi_set) pi_set.push_back(BoxToJson(b));
  const RunManifest& m = doc.manifest;
  return {
      {"manifest",
       {{"command", m.command},
        {"dataset_path", m.dataset_path},
        {"dataset_fingerprint", m.dataset_fingerprint},
        {"dataset_metadata", m.dataset_metadata},
        {"tool_version", m.tool_version},
        {"duration_seconds", m.duration_seconds}}},
      {"config",
       {{"lipschitz", r.config.lipschitz},
        {"tau", r.config.tau},
        {"max_sweeps", r.config.max_sweeps},
        {"update_mode", ToString(r.config.mode)}}},
      {"tree", {{"dimension", r.tree.dim()}, {"nodes", std::move(nodes)}}},
      {"pi_set", std::move(pi_set)},
      {"volume", r.volume},
      {"sweeps", r.sweeps},
      {"leaf_counts",
       {{"included", r.leaf_counts.included},
        {"excluded", r.leaf_counts.excluded},
        {"unknown", r.leaf_counts.unknown}}},
      {"terminated_by", ToString(r.terminated_by)},
      {"certificate", doc.certificate ? ToJson(*doc.certificate) : json()},
  };
}

ResultDocument FromJson(const json& j) {
  try {
    const json& jm = j.at("manifest");
    RunManifest manifest;
    manifest.command = jm.at("command").get<std::string>();
    manifest.dataset_path = jm.at("dataset_path").get<std::string>();
    manifest.dataset_fingerprint =
        jm.at("dataset_fingerprint").get<std::string>();
    manifest.dataset_metadata =
        jm.at("dataset_metadata").get<std::map<std::string, std::string>>();
    manifest.tool_version = jm.at("tool_version").get<std::string>();
    manifest.duration_seconds = jm.at("duration_seconds").get<double>();

    const json& jc = j.at("config");
    SynthConfig config;
    config.lipschitz = jc.at("lipschitz").get<double>();
    config.tau = jc.at("tau").get<double>();
    config.max_sweeps = jc.at("max_sweeps").get<int>();
    config.mode = ParseUpdateMode(jc.at("update_mode").get<std::string>());

    const int dim = j.at("tree").at("dimension").get<int>();
    if (dim < 1 || dim > 20) throw ResultFormatError("bad tree dimension");
    std::vector<TreeNode> nodes;
    const json& jn = j.at("tree").at("nodes");
    nodes.reserve(jn.size());
    for (std::size_t id = 0; id < jn.size(); ++id) {
      const json& e = jn[id];
      if (e.at("id").get<std::size_t>() != id) {
        throw ResultFormatError("node table is not in id order");
      }
      TreeNode n;
      n.parent = e.at("parent").get<int>();
      n.first_child = e.at("first_child").get<int>();
      n.child_count = e.at("child_count").get<int>();
      n.target_radius = e.at("target_radius").get<double>();
      n.target_center = VecFromJson(e.at("target_center"), dim, "target_center");
      n.sample_radius = e.at("sample_radius").get<double>();
      n.sample_index = e.at("sample_index").get<std::size_t>();
      n.sample.x = VecFromJson(e.at("x"), dim, "x");
      n.sample.x_plus = VecFromJson(e.at("x_plus"), dim, "x_plus");
      n.label = LabelFromInt(e.at("label").get<int>());
      nodes.push_back(std::move(n));
    }
    PartitionTree tree = PartitionTree::FromNodes(dim, std::move(nodes));

    BoxList pi_set;
    for (const json& b : j.at("pi_set")) {
      pi_set.emplace_back(VecFromJson(b.at("center"), dim, "center"),
                          b.at("radius").get<double>());
    }
    SynthResult result{std::move(tree), config, std::move(pi_set), 0.0, 0, {}, Termination::kFixpoint};
    result.volume = j.at("volume").get<double>();
    result.sweeps = j.at("sweeps").get<int>();
    result.leaf_counts.included = j.at("leaf_counts").at("included").get<std::size_t>();
    result.leaf_counts.excluded = j.at("leaf_counts").at("excluded").get<std::size_t>();
    result.leaf_counts.unknown = j.at("leaf_counts").at("unknown").get<std::size_t>();
    result.terminated_by =
        ParseTermination(j.at("terminated_by").get<std::string>());

    ResultDocument doc{std::move(manifest), std::move(result), std::nullopt};
    if (j.contains("certificate") && !j["certificate"].is_null()) {
      doc.certificate = CertificateFromJson(j["certificate"], dim);
    }
    return doc;
  } catch (const json::exception& e) {
    throw ResultFormatError(std::string("result file: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ResultFormatError(std::string("result file: ") + e.what());
  }
}

void SaveResult(const std::string& path, const ResultDocument& doc) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << ToJson(doc).dump(1) << "\n";
  if (!out) throw std::runtime_error("write failed: " + path);
}

ResultDocument LoadResult(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ResultFormatError(path + ": " + e.what());
  }
  return FromJson(j);
}

}  // namespace pisynth
