#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "tsmin/tree.hpp"

namespace tsmin::sim {

enum class Measure : std::uint8_t { TopDown, BottomUp, Combined, TreeEditDistance };

/// Short CLI names: topdown, bottomup, combined, ted.
std::string_view to_string(Measure m);
std::optional<Measure> measure_from_string(std::string_view name);
/// Like measure_from_string but throws Error{Config} for unknown names.
Measure parse_measure(std::string_view name);

/// Exact score as a fraction; value() is numerator / denominator.
struct Rational {
  std::uint64_t num = 0;
  std::uint64_t den = 1;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  friend bool operator==(const Rational&, const Rational&) = default;
};

struct SimilarityScore {
  Measure measure;
  double value;
  /// |V_m| for the subtree measures, the edit distance for TED.
  std::size_t common_size;
  Rational exact;
};

/// Pairs (node in T1, node in T2) of a common subtree.
using NodeMapping = std::vector<std::pair<NodeIndex, NodeIndex>>;

/// Roots match iff their labels are equal; matched nodes pair their children
/// positionally (i-th with i-th). Empty when the root labels differ.
NodeMapping top_down_mapping(const AstTree& t1, const AstTree& t2);

/// Equivalence class of every node of both trees, assigned in postorder over
/// t1 and then t2 with one shared table keyed by (label, child classes).
struct BottomUpClasses {
  std::vector<int> first;
  std::vector<int> second;
};
BottomUpClasses bottom_up_classes(const AstTree& t1, const AstTree& t2);

/// Size of the largest complete subtree shared by both trees (0 if none).
std::size_t bottom_up_size(const AstTree& t1, const AstTree& t2);

enum class OverlapMode : std::uint8_t {
  /// Exact set union over node identity in T1.
  NodeIdentity,
  /// A bottom-up node overlaps a top-down node when their labels and the
  /// labels of their parents, sibling lists and child lists agree.
  LabelHeuristic,
};

/// |V_m| of the combined measure for the ordered pair (t1, t2). No
/// canonicalization; combined() takes care of the pair order.
std::size_t combined_size(const AstTree& t1, const AstTree& t2, OverlapMode mode);

/// Unit-cost ordered tree edit distance (Zhang-Shasha).
std::size_t edit_distance(const AstTree& t1, const AstTree& t2);

Rational subtree_ratio(std::size_t v1, std::size_t v2, std::size_t common);
Rational edit_ratio(std::size_t v1, std::size_t v2, std::size_t distance);

SimilarityScore top_down(const AstTree& t1, const AstTree& t2);
SimilarityScore bottom_up(const AstTree& t1, const AstTree& t2);
/// Symmetric: the tree with the smaller digest plays T1.
SimilarityScore combined(const AstTree& t1, const AstTree& t2,
                         OverlapMode mode = OverlapMode::NodeIdentity);
SimilarityScore tree_edit_distance(const AstTree& t1, const AstTree& t2);

struct ScoreOptions {
  OverlapMode overlap = OverlapMode::NodeIdentity;
};

SimilarityScore score_pair(const AstTree& t1, const AstTree& t2, Measure measure,
                           const ScoreOptions& options = {});

}  // namespace tsmin::sim
