#pragma once

#include "beltrami/errors.hpp"
#include "beltrami/serialize.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace beltrami::lab {

using io::json;

std::string version();

/// Validated experiment description. `params` holds every parameter of the
/// kind with defaults filled in, so the config hash covers the full input.
struct ExperimentConfig {
  std::string kind;  ///< spectrum | abc | bernoulli | lyapunov | poincare | perturb | pi-map
  json params;
  std::uint64_t seed = 0;
  std::string output;  ///< empty: resolved by the caller
  int jobs = 1;

  json to_json() const;  ///< canonical form (kind, seed, params)
  std::string hash() const;
};

/// Strict validation: unknown keys, wrong types and out-of-range values
/// raise ConfigInvalid.
ExperimentConfig parse_config(const json& j);
ExperimentConfig load_config(const std::filesystem::path& path);

struct Assertion {
  std::string name;
  bool passed = false;
  double value = 0.0;
  std::string detail;
};

struct FileEntry {
  std::string path;  ///< relative to the output directory
  std::string sha256;
};

struct RunRecord {
  std::string config_hash;
  std::string tool_version;
  std::string kind;
  double wall_time = 0.0;
  json results;                       ///< kind-specific report (written as result.json)
  std::vector<io::CsvTable> tables;   ///< plot-ready data
  std::vector<std::pair<std::string, json>> sidecars;  ///< extra JSON documents
  std::vector<FileEntry> files;
  std::vector<Assertion> assertions;

  bool passed() const;
  json to_json() const;
};

/// Runs the experiment and writes result.json, sidecars, plot data and
/// run_record.json into `out_dir`. Module errors surface as ComputeFailure.
/// Everything except run_record.json is a pure function of the config.
RunRecord run(const ExperimentConfig& config, const std::filesystem::path& out_dir);

/// Computation only; nothing is written.
RunRecord compute(const ExperimentConfig& config);

/// Writes the CSV tables of a completed run; returns the manifest entries.
std::vector<FileEntry> emit_plot_data(const RunRecord& record, const std::filesystem::path& out_dir);

enum class Level { Quick, Full };

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  bool skipped = false;
  double seconds = 0.0;
  std::vector<Assertion> checks;
};

struct VerifySummary {
  Level level = Level::Quick;
  std::vector<CriterionResult> criteria;
  double seconds = 0.0;
  bool passed() const;
  json to_json() const;
};

/// Runs the acceptance checks. Quick omits the long Lyapunov runs; the
/// reproducibility check covers the quick subset. `progress` receives each
/// criterion as it finishes.
VerifySummary verify_suite(Level level, int jobs = 1,
                           const std::function<void(const CriterionResult&)>& progress = {});

/// One line per criterion: "criterion N PASS|FAIL|SKIP name (t s)".
std::string format_line(const CriterionResult& c);

}  // namespace beltrami::lab
