// Command-line front end: gen, synth, verify, bounds, report.
//
// Exit codes: 0 success or certified, 1 verification failure, 2 usage error,
// 3 I/O error. Progress and diagnostics go to stderr as key=value lines.

#include <chrono>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "pisynth/bounds.h"
#include "pisynth/dataset.h"
#include "pisynth/geometry.h"
#include "pisynth/partition_tree.h"
#include "pisynth/report.h"
#include "pisynth/result_io.h"
#include "pisynth/svg.h"
#include "pisynth/synthesis.h"
#include "pisynth/verify.h"

namespace pisynth {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One structured log line: `event=<name> k1=v1 k2=v2 ...`.
class LogLine {
 public:
  explicit LogLine(const std::string& event) { out_ << "event=" << event; }
  ~LogLine() { std::cerr << out_.str() << '\n'; }

  template <typename T>
  LogLine& operator()(const std::string& key, const T& value) {
    out_ << ' ' << key << '=' << value;
    return *this;
  }

 private:
  std::ostringstream out_;
};

std::string Quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::string ReadFileBytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

BoxList DomainOrUsage(const std::string& spec) {
  try {
    return ParseDomain(spec);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("bad --domain: ") + e.what());
  }
}

SystemOracle ResolveSystem(const std::string& system, const std::string& matrix,
                           double lipschitz) {
  try {
    if (!matrix.empty()) {
      return LinearSystem(ParseMatrix(matrix), lipschitz);
    }
    return BuiltinSystem(system);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

struct GenArgs {
  std::string system;
  std::string matrix;
  double lipschitz{0.0};
  std::string mode{"uniform"};
  std::size_t m{0};
  std::uint64_t seed{1};
  double tau{0.0};
  std::string domain;
  std::string out;
};

int RunGen(const GenArgs& a) {
  if (a.system.empty() && a.matrix.empty()) {
    throw UsageError("gen needs --system or --matrix");
  }
  const SystemOracle oracle = ResolveSystem(a.system, a.matrix, a.lipschitz);
  const std::string domain_spec =
      a.domain.empty() ? oracle.default_domain : a.domain;
  if (domain_spec.empty()) throw UsageError("gen needs --domain for this map");
  const BoxList domain = DomainOrUsage(domain_spec);
  if (domain.front().dim() != oracle.dim) {
    throw UsageError("domain dimension does not match the system");
  }
  Dataset generated = [&] {
    if (a.mode == "uniform") {
      if (a.m == 0) throw UsageError("uniform mode needs --m > 0");
      return GenerateUniform(oracle, domain, a.m, a.seed);
    }
    if (a.mode == "grid") {
      if (!(a.tau > 0.0)) throw UsageError("grid mode needs --tau > 0");
      return GenerateDyadicGrid(oracle, domain, a.tau);
    }
    throw UsageError("--mode must be uniform or grid");
  }();
  auto metadata = generated.metadata();
  metadata["domain"] = domain_spec;
  const Dataset data(generated.pairs(), std::move(metadata));
  try {
    SaveDataset(a.out, data);
  } catch (const DatasetError& e) {
    throw IoError(e.what());
  }
  LogLine("gen_done")("system", oracle.name)("mode", a.mode)("rows", data.size())(
      "out", a.out);
  return kExitOk;
}

struct SynthArgs {
  std::string data;
  std::string domain;
  double lipschitz{0.0};
  double tau{0.0};
  std::string mode{"sequential"};
  int max_sweeps{10000};
  std::string out;
  std::string svg;
  std::string overlay;
  std::string command;
};

void WriteSvg(const PartitionTree& tree, const std::string& path,
              const std::string& overlay, const std::string& title) {
  if (tree.dim() != 2) {
    LogLine("svg_skipped")("reason", "dimension")("dim", tree.dim());
    return;
  }
  SvgOptions options;
  options.title = title;
  if (!overlay.empty()) {
    try {
      options.overlay = LoadPolyline(overlay);
    } catch (const std::runtime_error& e) {
      throw IoError(e.what());
    }
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << RenderSvg(tree, options);
}

int RunSynth(const SynthArgs& a) {
  SynthConfig config;
  config.lipschitz = a.lipschitz;
  config.tau = a.tau;
  config.max_sweeps = a.max_sweeps;
  try {
    config.mode = ParseUpdateMode(a.mode);
    config.Validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  const std::string bytes = ReadFileBytes(a.data);
  std::istringstream stream(bytes);
  std::optional<Dataset> loaded;
  try {
    loaded.emplace(ReadDataset(stream));
  } catch (const DatasetError& e) {
    if (e.code() == DatasetError::Code::kIo) throw IoError(e.what());
    throw UsageError(a.data + ": " + e.what());
  }
  std::string domain_spec = a.domain;
  if (domain_spec.empty()) {
    auto it = loaded->metadata().find("domain");
    if (it == loaded->metadata().end()) {
      throw UsageError("no --domain given and the dataset does not record one");
    }
    domain_spec = it->second;
  }
  const BoxList domain = DomainOrUsage(domain_spec);
  LoadReport load_report;
  std::istringstream again(bytes);
  std::optional<Dataset> data;
  try {
    data.emplace(ReadDataset(again, {loaded->dim(), domain}, &load_report));
  } catch (const DatasetError& e) {
    throw UsageError(a.data + ": " + e.what());
  }
  loaded.reset();
  LogLine("dataset_loaded")("path", a.data)("rows", data->size())(
      "rejected_outside_domain", load_report.rejected_lines.size());

  const auto start = std::chrono::steady_clock::now();
  PartitionTree tree = [&] {
    try {
      return PartitionTree::Create(domain, *data);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }();
  SynthResult result = [&] {
    try {
      return Synthesize(std::move(tree), *data, config,
                        [](const ProgressEvent& e) {
                          LogLine("sweep")("index", e.sweep)(
                              "active_leaves", e.active_leaves)(
                              "volume", e.volume)(
                              "divisions", e.stats.divisions)(
                              "exclusions", e.stats.exclusions)(
                              "unknowns", e.stats.unknowns);
                        });
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }();
  const Certificate cert = CheckFixpoint(result, config);
  const double seconds = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - start)
                             .count();

  ResultDocument doc{RunManifest{}, std::move(result), cert};
  doc.manifest.command = a.command;
  doc.manifest.dataset_path = a.data;
  doc.manifest.dataset_fingerprint = FingerprintHex(bytes);
  doc.manifest.dataset_metadata = data->metadata();
  doc.manifest.duration_seconds = seconds;
  try {
    SaveResult(a.out, doc);
  } catch (const std::runtime_error& e) {
    throw IoError(e.what());
  }
  if (!a.svg.empty()) {
    WriteSvg(doc.result.tree, a.svg, a.overlay, a.data);
  }
  std::cout.precision(10);
  std::cout << "volume=" << doc.result.volume
            << " sweeps=" << doc.result.sweeps
            << " boxes=" << doc.result.pi_set.size()
            << " terminated_by=" << ToString(doc.result.terminated_by)
            << " certified=" << (cert.passed ? "true" : "false") << '\n';
  LogLine("synth_done")("volume", doc.result.volume)(
      "sweeps", doc.result.sweeps)("seconds", seconds)("out", a.out);
  return cert.passed ? kExitOk : kExitVerifyFailed;
}

struct VerifyArgs {
  std::string result;
  std::string system;
  std::string matrix;
  std::size_t mc_samples{100000};
  int horizon{50};
  std::uint64_t seed{1};
};

void ReportFailure(const Certificate& cert) {
  if (!cert.first_failure) return;
  LogLine("verify_failed")("method", ToString(cert.method))(
      "leaf", cert.first_failure->leaf_id)(
      "reason", Quote(cert.first_failure->reason));
}

int RunVerify(const VerifyArgs& a) {
  ResultDocument doc = [&] {
    try {
      return LoadResult(a.result);
    } catch (const std::runtime_error& e) {
      throw IoError(e.what());
    }
  }();
  const Certificate exact = CheckFixpoint(
      ActiveLeafRecords(doc.result.tree), doc.result.pi_set,
      doc.result.config.lipschitz);
  std::cout << "exact_coverage=" << (exact.passed ? "pass" : "fail")
            << " checked_leaves=" << exact.checked_leaves;
  if (exact.first_failure) {
    std::cout << " failing_leaf=" << exact.first_failure->leaf_id;
  }
  std::cout << '\n';
  ReportFailure(exact);
  bool ok = exact.passed;
  if (!a.system.empty() || !a.matrix.empty()) {
    const SystemOracle oracle = ResolveSystem(a.system, a.matrix, 0.0);
    if (doc.result.pi_set.empty()) {
      std::cout << "monte_carlo=skipped reason=empty_set\n";
    } else {
      const Certificate mc = MonteCarloInvariance(
          doc.result.pi_set, oracle, a.mc_samples, a.horizon, a.seed);
      std::cout << "monte_carlo=" << (mc.passed ? "pass" : "fail")
                << " trajectories=" << mc.checked_leaves << '\n';
      ReportFailure(mc);
      ok = ok && mc.passed;
    }
  }
  return ok ? kExitOk : kExitVerifyFailed;
}

struct BoundsArgs {
  double vol{0.0};
  std::string domain;
  int n{0};
  double tau{0.0};
  double epsilon{0.0};
  double delta{0.05};
};

int RunBounds(const BoundsArgs& a) {
  double vol = a.vol;
  int n = a.n;
  if (!a.domain.empty()) {
    const BoxList domain = DomainOrUsage(a.domain);
    vol = TotalVolume(domain);
    if (n == 0) n = domain.front().dim();
  }
  if (!(vol > 0.0)) throw UsageError("bounds needs --vol > 0 or --domain");
  if (n < 1) throw UsageError("bounds needs --n >= 1");
  if (!(a.tau > 0.0)) throw UsageError("bounds needs --tau > 0");
  const double epsilon = a.epsilon > 0.0 ? a.epsilon : a.tau;
  BoundQuery query{a.delta, vol, n, a.tau};
  BoundQuery covering_query{a.delta, vol, n, epsilon};
  std::cout.precision(12);
  try {
    std::cout << "volume=" << vol << " n=" << n << " tau=" << a.tau
              << " epsilon=" << epsilon << " delta=" << a.delta << '\n';
    // The grid form (1/tau)^n vol is the sample count a deterministic grid
    // needs; the epsilon form divides by the unit-ball volume 2^n.
    std::cout << "covering_lower_bound=" << GridSampleBound(vol, n, a.tau)
              << '\n';
    std::cout << "covering_number_lower_bound="
              << CoveringLowerBound(vol, n, epsilon) << '\n';
    const SampleBound covering =
        UniformSampleBound(covering_query, BoundForm::kCoveringAsPrinted);
    const SampleBound resolution =
        UniformSampleBound(query, BoundForm::kResolutionAsPrinted);
    const SampleBound canonical =
        UniformSampleBound(query, BoundForm::kCanonical);
    std::cout << "covering_as_printed=" << covering.value << '\n';
    std::cout << "resolution_as_printed=" << resolution.value << '\n';
    std::cout << "canonical=" << canonical.value << '\n';
    for (const SampleBound* b : {&covering, &resolution, &canonical}) {
      if (b->warning) LogLine("bound_warning")("message", Quote(*b->warning));
    }
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return kExitOk;
}

struct ReportArgs {
  std::string dir;
  std::string out;
};

int RunReport(const ReportArgs& a) {
  std::vector<RunSummary> runs;
  try {
    runs = ScanResults(a.dir);
  } catch (const std::runtime_error& e) {
    throw IoError(e.what());
  }
  const std::string csv = ReportCsv(Aggregate(runs));
  if (a.out.empty()) {
    std::cout << csv;
  } else {
    std::ofstream out(a.out);
    if (!out || !(out << csv)) throw IoError("cannot write " + a.out);
  }
  LogLine("report_done")("results", runs.size());
  return kExitOk;
}

int Main(int argc, char** argv) {
  CLI::App app{"Data-driven positive invariant set synthesis"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  std::string command;
  for (int i = 0; i < argc; ++i) command += (i ? " " : "") + std::string(argv[i]);

  GenArgs gen;
  CLI::App* gen_cmd = app.add_subcommand("gen", "Generate a sample dataset");
  gen_cmd->add_option("--system", gen.system, "linear2d or nonlinear2d");
  gen_cmd->add_option("--matrix", gen.matrix,
                      "Linear map x+ = A x given as \"a11,a12;a21,a22\"");
  gen_cmd->add_option("--lipschitz", gen.lipschitz,
                      "Lipschitz bound recorded for --matrix (default ||A||inf)");
  gen_cmd->add_option("--mode", gen.mode, "uniform or grid");
  gen_cmd->add_option("--m", gen.m, "Number of uniform samples");
  gen_cmd->add_option("--seed", gen.seed, "RNG seed for uniform mode");
  gen_cmd->add_option("--tau", gen.tau, "Smallest grid radius for grid mode");
  gen_cmd->add_option("--domain", gen.domain, "\"lo1,lo2:hi1,hi2\"");
  gen_cmd->add_option("--out", gen.out, "Output CSV")->required();

  SynthArgs synth;
  CLI::App* synth_cmd = app.add_subcommand("synth", "Synthesize a PI set");
  synth_cmd->add_option("--data", synth.data, "Dataset CSV")->required();
  synth_cmd->add_option("--domain", synth.domain,
                        "\"lo1,lo2:hi1,hi2\" (default: recorded in dataset)");
  synth_cmd->add_option("--lipschitz", synth.lipschitz, "Lipschitz bound L")
      ->required();
  synth_cmd->add_option("--tau", synth.tau, "Smallest target radius")
      ->required();
  synth_cmd->add_option("--mode", synth.mode, "sequential or batch");
  synth_cmd->add_option("--max-sweeps", synth.max_sweeps, "Sweep safeguard");
  synth_cmd->add_option("--out", synth.out, "Result JSON")->required();
  synth_cmd->add_option("--svg", synth.svg, "Optional SVG rendering (n = 2)");
  synth_cmd->add_option("--overlay", synth.overlay,
                        "Optional \"x,y\" CSV drawn as a curve on the SVG");

  VerifyArgs verify;
  CLI::App* verify_cmd =
      app.add_subcommand("verify", "Re-check a result file's certificate");
  verify_cmd->add_option("--result", verify.result, "Result JSON")->required();
  verify_cmd->add_option("--system", verify.system,
                         "Also run a Monte Carlo check with this system");
  verify_cmd->add_option("--matrix", verify.matrix,
                         "Monte Carlo check with x+ = A x");
  verify_cmd->add_option("--mc-samples", verify.mc_samples,
                         "Monte Carlo trajectories");
  verify_cmd->add_option("--horizon", verify.horizon, "Monte Carlo horizon");
  verify_cmd->add_option("--seed", verify.seed, "Monte Carlo seed");

  BoundsArgs bounds;
  CLI::App* bounds_cmd =
      app.add_subcommand("bounds", "Evaluate sample-complexity bounds");
  bounds_cmd->add_option("--vol", bounds.vol, "Domain volume");
  bounds_cmd->add_option("--domain", bounds.domain, "Domain (sets vol and n)");
  bounds_cmd->add_option("--n", bounds.n, "State dimension");
  bounds_cmd->add_option("--tau", bounds.tau, "Resolution")->required();
  bounds_cmd->add_option("--epsilon", bounds.epsilon,
                         "Net radius for the covering forms (default tau)");
  bounds_cmd->add_option("--delta", bounds.delta, "Failure probability");

  ReportArgs report;
  CLI::App* report_cmd =
      app.add_subcommand("report", "Aggregate result files into a CSV");
  report_cmd->add_option("--dir", report.dir, "Directory of result JSON files")
      ->required();
  report_cmd->add_option("--out", report.out, "Output CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen_cmd) return RunGen(gen);
    if (*synth_cmd) {
      synth.command = command;
      return RunSynth(synth);
    }
    if (*verify_cmd) return RunVerify(verify);
    if (*bounds_cmd) return RunBounds(bounds);
    if (*report_cmd) return RunReport(report);
  } catch (const UsageError& e) {
    LogLine("error")("kind", "usage")("message", Quote(e.what()));
    return kExitUsage;
  } catch (const IoError& e) {
    LogLine("error")("kind", "io")("message", Quote(e.what()));
    return kExitIo;
  } catch (const ResultFormatError& e) {
    LogLine("error")("kind", "io")("message", Quote(e.what()));
    return kExitIo;
  }
  return kExitUsage;
}

}  // namespace
}  // namespace pisynth

int main(int argc, char** argv) { return pisynth::Main(argc, argv); }
