#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tsmin/similarity.hpp"
#include "tsmin/tree.hpp"

namespace tsmin {

struct MatrixMember {
  std::string id;
  Digest digest;

  friend bool operator==(const MatrixMember&, const MatrixMember&) = default;
};

/// Dense symmetric pairwise score table over a roster. Diagonal is 1.
class SimilarityMatrix {
 public:
  SimilarityMatrix() = default;
  SimilarityMatrix(std::vector<MatrixMember> roster, sim::Measure measure,
                   sim::OverlapMode overlap = sim::OverlapMode::NodeIdentity);

  std::size_t size() const noexcept { return roster_.size(); }
  const std::vector<MatrixMember>& roster() const noexcept { return roster_; }
  sim::Measure measure() const noexcept { return measure_; }
  sim::OverlapMode overlap() const noexcept { return overlap_; }

  double value(std::size_t i, std::size_t j) const { return values_[i * size() + j]; }
  const sim::Rational& exact(std::size_t i, std::size_t j) const {
    return exact_[i * size() + j];
  }
  /// Sets both (i, j) and (j, i). Off-diagonal only.
  void set(std::size_t i, std::size_t j, sim::Rational r);
  /// Row-major n*n values, for the search.
  const std::vector<double>& values() const noexcept { return values_; }

  /// Seconds spent scoring; not part of equality.
  std::optional<double> scoring_seconds;

  /// Same roster, measure and exact entries.
  bool same_content(const SimilarityMatrix& other) const;

 private:
  std::vector<MatrixMember> roster_;
  sim::Measure measure_ = sim::Measure::TopDown;
  sim::OverlapMode overlap_ = sim::OverlapMode::NodeIdentity;
  std::vector<sim::Rational> exact_;
  std::vector<double> values_;
};

struct BuildOptions {
  sim::Measure measure = sim::Measure::Combined;
  sim::OverlapMode overlap = sim::OverlapMode::NodeIdentity;
  /// Worker threads; values below 1 mean 1.
  unsigned jobs = 1;
  /// Scores from an earlier run, looked up by digest pair.
  const SimilarityMatrix* prior = nullptr;
};

struct BuildReport {
  std::size_t computed_pairs = 0;
  std::size_t reused_pairs = 0;
  std::vector<std::string> warnings;
};

/// Scores every unordered pair. `trees[i]` belongs to `roster[i]`.
SimilarityMatrix build_matrix(const std::vector<MatrixMember>& roster,
                              const std::vector<AstTree>& trees,
                              const BuildOptions& options, BuildReport* report = nullptr);

/// Canonical text form (see docs/file-formats.md).
std::string serialize_matrix(const SimilarityMatrix& m, bool include_timing = true);
SimilarityMatrix deserialize_matrix(std::string_view text);

void save_matrix(const SimilarityMatrix& m, const std::filesystem::path& path,
                 bool include_timing = true);
SimilarityMatrix load_matrix(const std::filesystem::path& path);

/// Loads a matrix that must describe exactly `expected` (same ids, digests
/// and order). Any difference throws Error{Stale}.
SimilarityMatrix load_matrix_for(const std::filesystem::path& path,
                                 const std::vector<MatrixMember>& expected);

}  // namespace tsmin
