#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tsmin/artifacts.hpp"
#include "tsmin/evaluation.hpp"
#include "tsmin/frontend.hpp"
#include "tsmin/search.hpp"
#include "tsmin/sim_matrix.hpp"
#include "tsmin/similarity.hpp"

namespace tsmin::cli {

namespace fs = std::filesystem;

struct RunConfig {
  fs::path corpus;
  fs::path out = "tsmin-out";
  std::optional<fs::path> cache;
  std::optional<fs::path> fault_map;

  frontend::PreprocessConfig preprocess;
  std::vector<sim::Measure> measures = {sim::Measure::Combined};
  sim::OverlapMode overlap = sim::OverlapMode::NodeIdentity;
  search::SearchConfig search;
  std::vector<std::uint64_t> seeds = {1};
  /// Allow NSGA-II on any two measures, not only topdown+bottomup and
  /// combined+ted.
  bool any_pair = false;
  std::optional<std::string> version_id;
  /// Label prefix of the report runs that others are compared against.
  std::optional<std::string> baseline;
  /// `all` also minimizes with the random baseline.
  bool random_baseline = false;

  unsigned jobs = 1;
  bool timing = true;

  /// Throws Error{Config} on inconsistent settings.
  void validate() const;
  /// Settings that affect results. Output dir, jobs and timing are left out
  /// so that runs differing only in those produce identical files.
  nlohmann::ordered_json echo() const;
  /// Applies a config document. Unknown keys throw Error{Config}.
  void merge(const nlohmann::ordered_json& doc);
};

RunConfig load_config_file(const fs::path& path);

struct PrepareResult {
  Roster roster;
  std::size_t files = 0;
  double seconds = 0.0;
  std::vector<std::string> warnings;
};
PrepareResult cmd_prepare(const RunConfig& config);

struct SimilarityResult {
  std::vector<fs::path> files;
  std::vector<BuildReport> reports;
  double seconds = 0.0;
};
SimilarityResult cmd_similarity(const RunConfig& config);

struct MinimizeResult {
  std::vector<fs::path> files;
  std::vector<search::MinimizationResult> runs;
};
MinimizeResult cmd_minimize(const RunConfig& config);

struct EvaluateResult {
  std::vector<eval::EvalReport> reports;
  std::vector<eval::Comparison> comparisons;
  fs::path json_file;
  fs::path table_file;
};
/// Evaluates `suites`, or every minimized-*.json in the output dir if empty.
EvaluateResult cmd_evaluate(const RunConfig& config, std::vector<fs::path> suites = {});

/// Artifact names inside the output directory.
fs::path roster_path(const RunConfig& config);
fs::path matrix_path(const RunConfig& config, sim::Measure measure);
/// e.g. "ga-combined-b50", "nsga2-combined+ted-b50", "random-b25".
std::string run_label(const RunConfig& config, search::Algorithm algorithm,
                      const std::vector<sim::Measure>& measures);
fs::path minimized_path(const RunConfig& config, const std::string& label,
                        std::uint64_t seed);

/// Reads a minimized suite file for evaluation.
eval::Suite load_suite(const fs::path& path, std::string* label = nullptr);

/// Parses "A..B" or a single integer.
std::vector<std::uint64_t> parse_seed_range(const std::string& text);

/// Command-line entry point. Returns the process exit code: 0 on success, 1
/// for data or configuration errors, 2 for internal failures.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tsmin::cli
