#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace tsmin::eval {

struct FaultVersion {
  std::string id;
  std::vector<std::string> failing;  // non-empty
};

struct FaultMap {
  std::vector<FaultVersion> versions;  // at least one
};

FaultMap parse_fault_map(std::string_view text);
FaultMap load_fault_map(const std::filesystem::path& path);
std::string serialize_fault_map(const FaultMap& map);

/// A minimized suite as evaluation sees it.
struct Suite {
  /// Version the suite was minimized for; unset means it applies to every
  /// version without a suite of its own.
  std::optional<std::string> version;
  std::uint64_t seed = 0;
  std::vector<std::string> roster;    // all test ids of the version
  std::vector<std::string> selected;  // ids kept by the minimizer
};

struct VersionOutcome {
  std::string id;
  bool detected = false;
  std::vector<std::string> detecting;  // selected failing tests
};

struct FdrResult {
  std::vector<VersionOutcome> versions;
  std::size_t detected = 0;
  double fdr = 0.0;
};

/// f_i = 1 iff the version's suite keeps a failing test; FDR = sum f_i / m.
/// A version without a suite, or a failing id missing from its roster,
/// throws Error{Data}.
FdrResult compute_fdr(const FaultMap& faults, const std::vector<Suite>& suites);

struct Stats {
  std::size_t count = 0;
  double min = 0, q1 = 0, median = 0, mean = 0, q3 = 0, max = 0;
};

/// Quartiles by linear interpolation between order statistics.
Stats describe(std::vector<double> values);

/// Two-sided Fisher exact test on [[a, b], [c, d]]: the sum of the
/// probabilities of all tables with the same margins that are no more
/// likely than the observed one. Throws Error{Undefined} if a row is empty.
double fisher_exact(std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d);

struct OddsRatio {
  double value;
  bool corrected;  // 0.5 added to every cell because one was zero
};

/// (a*d)/(b*c), with the +0.5 correction when any cell is zero.
OddsRatio odds_ratio(std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d);

struct SeedResult {
  std::uint64_t seed;
  FdrResult result;
};

struct EvalReport {
  std::string label;
  std::size_t versions = 0;
  std::vector<SeedResult> seeds;
  Stats fdr;
};

/// Groups suites by seed and computes one FDR per seed.
EvalReport evaluate(const FaultMap& faults, const std::vector<Suite>& suites,
                    std::string label = {});

/// Fisher test and odds ratio on detections pooled over seeds.
struct Comparison {
  std::string a, b;
  std::uint64_t detected_a, missed_a, detected_b, missed_b;
  double p_value;
  OddsRatio odds;
};
Comparison compare(const EvalReport& a, const EvalReport& b);

nlohmann::ordered_json report_json(const std::vector<EvalReport>& reports,
                                   const std::vector<Comparison>& comparisons);
/// Plain-text table with one row per report.
std::string report_table(const std::vector<EvalReport>& reports,
                         const std::vector<Comparison>& comparisons);

}  // namespace tsmin::eval
