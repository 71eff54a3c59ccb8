#include "tsmin/similarity.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <tuple>

#include "tsmin/error.hpp"

namespace tsmin::sim {

namespace {

constexpr std::pair<Measure, std::string_view> kMeasureNames[] = {
    {Measure::TopDown, "topdown"},
    {Measure::BottomUp, "bottomup"},
    {Measure::Combined, "combined"},
    {Measure::TreeEditDistance, "ted"},
};

void top_down_rec(const AstTree& t1, const AstTree& t2, NodeIndex u, NodeIndex v,
                  NodeMapping& out) {
  if (t1.label(u) != t2.label(v)) return;
  out.emplace_back(u, v);
  auto c1 = t1.children(u);
  auto c2 = t2.children(v);
  std::size_t k = std::min(c1.size(), c2.size());
  for (std::size_t i = 0; i < k; ++i) top_down_rec(t1, t2, c1[i], c2[i], out);
}

Rational ratio(std::uint64_t num, std::uint64_t den) {
  if (den == 0) return {0, 1};
  return {num, den};
}

SimilarityScore make_score(Measure m, std::size_t common, Rational r) {
  return {m, r.value(), common, r};
}

// Label signature used by the heuristic overlap test.
using Signature = std::tuple<NodeLabel, std::optional<NodeLabel>,
                             std::vector<NodeLabel>, std::vector<NodeLabel>>;

Signature signature(const AstTree& t, NodeIndex x) {
  std::optional<NodeLabel> parent;
  std::vector<NodeLabel> siblings;
  NodeIndex p = t.parent(x);
  if (p != kNoNode) {
    parent = t.label(p);
    for (NodeIndex s : t.children(p)) siblings.push_back(t.label(s));
  }
  std::vector<NodeLabel> kids;
  for (NodeIndex c : t.children(x)) kids.push_back(t.label(c));
  return {t.label(x), std::move(parent), std::move(siblings), std::move(kids)};
}

}  // namespace

std::string_view to_string(Measure m) {
  for (const auto& [k, name] : kMeasureNames)
    if (k == m) return name;
  return "unknown";
}

std::optional<Measure> measure_from_string(std::string_view name) {
  for (const auto& [k, n] : kMeasureNames)
    if (n == name) return k;
  return std::nullopt;
}

Measure parse_measure(std::string_view name) {
  if (auto m = measure_from_string(name)) return *m;
  throw Error(ErrorKind::Config,
              "unknown similarity measure '" + std::string(name) +
                  "' (expected topdown, bottomup, combined or ted)");
}

NodeMapping top_down_mapping(const AstTree& t1, const AstTree& t2) {
  NodeMapping out;
  top_down_rec(t1, t2, t1.root(), t2.root(), out);
  return out;
}

BottomUpClasses bottom_up_classes(const AstTree& t1, const AstTree& t2) {
  std::map<NodeLabel, int> labels;
  std::map<std::pair<int, std::vector<int>>, int> table;
  auto assign = [&](const AstTree& t) {
    std::vector<int> cls(t.size(), -1);
    for (NodeIndex i : t.postorder()) {
      int lid = labels.try_emplace(t.label(i), static_cast<int>(labels.size()))
                    .first->second;
      std::vector<int> kids;
      kids.reserve(t.children(i).size());
      for (NodeIndex c : t.children(i)) kids.push_back(cls[c]);
      auto key = std::make_pair(lid, std::move(kids));
      cls[i] = table.try_emplace(std::move(key), static_cast<int>(table.size()))
                   .first->second;
    }
    return cls;
  };
  BottomUpClasses out;
  out.first = assign(t1);
  out.second = assign(t2);
  return out;
}

namespace {

// Largest shared class size and the T1 nodes whose subtree attains it.
std::pair<std::size_t, std::vector<NodeIndex>> bottom_up_candidates(const AstTree& t1,
                                                                    const AstTree& t2) {
  auto classes = bottom_up_classes(t1, t2);
  std::set<int> in_second(classes.second.begin(), classes.second.end());
  std::size_t best = 0;
  std::vector<NodeIndex> roots;
  for (std::size_t i = 0; i < t1.size(); ++i) {
    if (!in_second.count(classes.first[i])) continue;
    std::size_t s = t1.subtree_size(static_cast<NodeIndex>(i));
    if (s > best) {
      best = s;
      roots.clear();
    }
    if (s == best) roots.push_back(static_cast<NodeIndex>(i));
  }
  return {best, roots};
}

}  // namespace

std::size_t bottom_up_size(const AstTree& t1, const AstTree& t2) {
  return bottom_up_candidates(t1, t2).first;
}

std::size_t combined_size(const AstTree& t1, const AstTree& t2, OverlapMode mode) {
  NodeMapping td = top_down_mapping(t1, t2);
  auto [bu_size, roots] = bottom_up_candidates(t1, t2);
  if (roots.empty()) return td.size();

  std::vector<char> in_td(t1.size(), 0);
  for (const auto& pr : td) in_td[pr.first] = 1;
  std::set<Signature> td_sigs;
  if (mode == OverlapMode::LabelHeuristic)
    for (const auto& pr : td) td_sigs.insert(signature(t1, pr.first));

  std::size_t best = 0;
  for (NodeIndex u : roots) {
    std::size_t overlap = 0;
    for (std::size_t x = static_cast<std::size_t>(u); x < u + bu_size; ++x) {
      if (mode == OverlapMode::NodeIdentity)
        overlap += in_td[x];
      else
        overlap += td_sigs.count(signature(t1, static_cast<NodeIndex>(x)));
    }
    best = std::max(best, td.size() + bu_size - overlap);
  }
  return best;
}

std::size_t edit_distance(const AstTree& t1, const AstTree& t2) {
  // Postorder numbering 1..n with leftmost leaf descendants.
  struct Post {
    std::vector<const NodeLabel*> label;
    std::vector<std::size_t> lml;
    std::vector<std::size_t> keyroots;
  };
  auto prepare = [](const AstTree& t) {
    Post p;
    std::size_t n = t.size();
    p.label.assign(n + 1, nullptr);
    p.lml.assign(n + 1, 0);
    std::vector<std::size_t> post_of(n, 0);
    std::size_t k = 0;
    for (NodeIndex i : t.postorder()) {
      post_of[i] = ++k;
      p.label[k] = &t.label(i);
      auto kids = t.children(i);
      p.lml[k] = kids.empty() ? k : p.lml[post_of[kids.front()]];
    }
    std::vector<char> seen(n + 2, 0);
    for (std::size_t i = n; i >= 1; --i) {
      if (!seen[p.lml[i]]) {
        seen[p.lml[i]] = 1;
        p.keyroots.push_back(i);
      }
    }
    std::reverse(p.keyroots.begin(), p.keyroots.end());
    return p;
  };
  Post a = prepare(t1);
  Post b = prepare(t2);
  std::size_t n1 = t1.size();
  std::size_t n2 = t2.size();
  std::vector<std::size_t> td((n1 + 1) * (n2 + 1), 0);
  std::vector<std::size_t> fd((n1 + 1) * (n2 + 1), 0);
  auto TD = [&](std::size_t i, std::size_t j) -> std::size_t& { return td[i * (n2 + 1) + j]; };
  auto FD = [&](std::size_t i, std::size_t j) -> std::size_t& { return fd[i * (n2 + 1) + j]; };

  for (std::size_t i : a.keyroots) {
    for (std::size_t j : b.keyroots) {
      std::size_t li = a.lml[i];
      std::size_t lj = b.lml[j];
      FD(li - 1, lj - 1) = 0;
      for (std::size_t x = li; x <= i; ++x) FD(x, lj - 1) = FD(x - 1, lj - 1) + 1;
      for (std::size_t y = lj; y <= j; ++y) FD(li - 1, y) = FD(li - 1, y - 1) + 1;
      for (std::size_t x = li; x <= i; ++x) {
        for (std::size_t y = lj; y <= j; ++y) {
          std::size_t del = FD(x - 1, y) + 1;
          std::size_t ins = FD(x, y - 1) + 1;
          if (a.lml[x] == li && b.lml[y] == lj) {
            std::size_t ren = FD(x - 1, y - 1) + (*a.label[x] == *b.label[y] ? 0 : 1);
            FD(x, y) = std::min({del, ins, ren});
            TD(x, y) = FD(x, y);
          } else {
            std::size_t sub = FD(a.lml[x] - 1, b.lml[y] - 1) + TD(x, y);
            FD(x, y) = std::min({del, ins, sub});
          }
        }
      }
    }
  }
  return TD(n1, n2);
}

Rational subtree_ratio(std::size_t v1, std::size_t v2, std::size_t common) {
  std::uint64_t den = v1 + v2;
  std::uint64_t num = 2 * static_cast<std::uint64_t>(common);
  if (num > den) num = den;
  return ratio(num, den);
}

Rational edit_ratio(std::size_t v1, std::size_t v2, std::size_t distance) {
  std::uint64_t den = v1 + v2;
  std::uint64_t num = distance >= den ? 0 : den - distance;
  return ratio(num, den);
}

SimilarityScore top_down(const AstTree& t1, const AstTree& t2) {
  std::size_t m = top_down_mapping(t1, t2).size();
  return make_score(Measure::TopDown, m, subtree_ratio(t1.size(), t2.size(), m));
}

SimilarityScore bottom_up(const AstTree& t1, const AstTree& t2) {
  std::size_t m = bottom_up_size(t1, t2);
  return make_score(Measure::BottomUp, m, subtree_ratio(t1.size(), t2.size(), m));
}

SimilarityScore combined(const AstTree& t1, const AstTree& t2, OverlapMode mode) {
  bool swap = t2.digest() < t1.digest();
  const AstTree& a = swap ? t2 : t1;
  const AstTree& b = swap ? t1 : t2;
  std::size_t m = combined_size(a, b, mode);
  return make_score(Measure::Combined, m, subtree_ratio(a.size(), b.size(), m));
}

SimilarityScore tree_edit_distance(const AstTree& t1, const AstTree& t2) {
  std::size_t d = edit_distance(t1, t2);
  return make_score(Measure::TreeEditDistance, d, edit_ratio(t1.size(), t2.size(), d));
}

SimilarityScore score_pair(const AstTree& t1, const AstTree& t2, Measure measure,
                           const ScoreOptions& options) {
  switch (measure) {
    case Measure::TopDown:
      return top_down(t1, t2);
    case Measure::BottomUp:
      return bottom_up(t1, t2);
    case Measure::Combined:
      return combined(t1, t2, options.overlap);
    case Measure::TreeEditDistance:
      return tree_edit_distance(t1, t2);
  }
  throw Error(ErrorKind::Config, "unknown similarity measure");
}

}  // namespace tsmin::sim
