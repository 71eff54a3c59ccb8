// One line per acceptance criterion; exit status is nonzero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "tsmin/artifacts.hpp"
#include "tsmin/cli.hpp"
#include "tsmin/error.hpp"
#include "tsmin/evaluation.hpp"
#include "tsmin/frontend.hpp"
#include "tsmin/lexer.hpp"
#include "tsmin/search.hpp"
#include "tsmin/sim_matrix.hpp"
#include "tsmin/similarity.hpp"

using namespace tsmin;
using frontend::lex;
using frontend::TokenKind;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

const sim::Measure kMeasures[] = {sim::Measure::TopDown, sim::Measure::BottomUp,
                                  sim::Measure::Combined, sim::Measure::TreeEditDistance};

struct Verdict {
  bool pass;
  std::string detail;
};

std::vector<std::string> token_texts(std::string_view src) {
  std::vector<std::string> out;
  for (const auto& t : lex(src))
    if (t.kind != TokenKind::End) out.push_back(t.text);
  return out;
}

std::vector<double> flatten(const std::vector<std::vector<double>>& m) {
  std::vector<double> out;
  for (const auto& row : m) out.insert(out.end(), row.begin(), row.end());
  return out;
}

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("tsmin-acceptance-" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = cli::run(args, out, err);
  if (code != 0) std::fprintf(stderr, "tsmin %s failed: %s", args[0].c_str(), err.str().c_str());
  return code;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

Verdict golden_listing() {
  std::string before = read_file(fs::path(TSMIN_FIXTURES) / "golden/before.java");
  std::string after = read_file(fs::path(TSMIN_FIXTURES) / "golden/after.java");
  auto start = Clock::now();
  std::string got = frontend::preprocess(before);
  double s = std::chrono::duration<double>(Clock::now() - start).count();
  bool same = token_texts(got) == token_texts(after);
  return {same && s < 1.0, same ? "token-equal" : "tokens differ"};
}

Verdict axioms() {
  search::Rng rng(2024, 0);
  std::size_t bad = 0;
  for (int k = 0; k < 1000; ++k) {
    AstTree t = oracle::random_tree(rng, 30, 8);
    for (auto m : kMeasures) bad += sim::score_pair(t, t, m).value != 1.0;
  }
  for (int k = 0; k < 1000; ++k) {
    AstTree a = oracle::random_tree(rng, 30, 5);
    AstTree b = oracle::random_tree(rng, 30, 5);
    for (auto m : kMeasures) {
      auto ab = sim::score_pair(a, b, m);
      auto ba = sim::score_pair(b, a, m);
      bad += ab.value != ba.value;
      bad += !(ab.value >= 0.0 && ab.value <= 1.0);
    }
  }
  return {bad == 0, std::to_string(bad) + " violations over 1000 trees and 1000 pairs"};
}

Verdict oracles() {
  search::Rng rng(77, 0);
  std::size_t ted_bad = 0, td_bad = 0, bu_bad = 0;
  for (int k = 0; k < 200; ++k) {
    AstTree a = oracle::random_tree(rng, 6, 3);
    AstTree b = oracle::random_tree(rng, 6, 3);
    ted_bad += sim::edit_distance(a, b) != oracle::edit_distance(a, b);
  }
  for (int k = 0; k < 200; ++k) {
    AstTree a = oracle::random_tree(rng, 8, 3);
    AstTree b = oracle::random_tree(rng, 8, 3);
    td_bad += sim::top_down_mapping(a, b).size() != oracle::top_down_size(a, b);
    bu_bad += sim::bottom_up_size(a, b) != oracle::bottom_up_size(a, b);
  }
  return {ted_bad + td_bad + bu_bad == 0,
          "mismatches ted " + std::to_string(ted_bad) + ", topdown " + std::to_string(td_bad) +
              ", bottomup " + std::to_string(bu_bad)};
}

Verdict formulas() {
  search::Rng rng(5, 0);
  double worst = 0.0;
  for (int k = 0; k < 500; ++k) {
    AstTree a = oracle::random_tree(rng, 25, 4);
    AstTree b = oracle::random_tree(rng, 25, 4);
    double v = static_cast<double>(a.size() + b.size());
    for (auto m : kMeasures) {
      auto s = sim::score_pair(a, b, m);
      double want = m == sim::Measure::TreeEditDistance
                        ? (v - static_cast<double>(s.common_size)) / v
                        : std::min(1.0, 2.0 * static_cast<double>(s.common_size) / v);
      worst = std::max(worst, std::abs(want - s.value));
    }
    // The common sizes themselves come from the independent oracles.
    double td = 2.0 * static_cast<double>(oracle::top_down_size(a, b)) / v;
    double bu = 2.0 * static_cast<double>(oracle::bottom_up_size(a, b)) / v;
    worst = std::max(worst, std::abs(td - sim::top_down(a, b).value));
    worst = std::max(worst, std::abs(bu - sim::bottom_up(a, b).value));
  }
  return {worst <= 1e-12, fmt("max deviation %.3g", worst)};
}

Verdict ga_optimum() {
  int hits = 0, beaten = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto sim = oracle::random_matrix(12, seed);
    auto flat = flatten(sim);
    search::SearchConfig cfg;
    cfg.seed = seed;
    auto r = search::run_ga(search::MatrixView(12, flat), cfg);
    double best = oracle::exhaustive_minimum(sim, 6);
    if (r.best_fitness[0] < best - 1e-12) ++beaten;
    if (std::abs(r.best_fitness[0] - best) <= 1e-12) ++hits;
  }
  return {hits >= 8 && beaten == 0,
          std::to_string(hits) + " of 10 seeds at the exhaustive optimum, " +
              std::to_string(beaten) + " below it"};
}

Verdict invariants() {
  search::Rng rng(31, 0);
  std::size_t broken = 0;
  for (int k = 0; k < 10000; ++k) {
    auto a = search::random_subset(40, 17, rng);
    auto b = search::random_subset(40, 17, rng);
    auto [c1, c2] = search::crossover(a, b, rng, 0.9);
    search::mutate(c1, rng, 0.5);
    broken += search::popcount(c1) != 17 || search::popcount(c2) != 17;
  }
  std::size_t trace_bad = 0, gens_bad = 0, front_bad = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto m1 = flatten(oracle::random_matrix(30, seed));
    auto m2 = flatten(oracle::random_matrix(30, seed + 100));
    search::SearchConfig cfg;
    cfg.seed = seed;
    auto ga = search::run_ga(search::MatrixView(30, m1), cfg);
    for (std::size_t i = 1; i < ga.trace.size(); ++i) trace_bad += ga.trace[i] > ga.trace[i - 1];
    gens_bad += ga.generations < cfg.min_generations;
    auto ns = search::run_nsga2(search::MatrixView(30, m1), search::MatrixView(30, m2), cfg);
    gens_bad += ns.generations < cfg.min_generations;
    for (const auto& x : ns.front)
      for (const auto& y : ns.front) front_bad += search::dominates(x.fitness, y.fitness);
  }
  return {broken + trace_bad + gens_bad + front_bad == 0,
          "size " + std::to_string(broken) + ", trace " + std::to_string(trace_bad) +
              ", generations " + std::to_string(gens_bad) + ", front " +
              std::to_string(front_bad) + " violations"};
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file())
      files[fs::relative(e.path(), dir).generic_string()] = read_file(e.path());
  return files;
}

Verdict determinism() {
  fs::path root = scratch("determinism");
  write_file(root / "faults.json", R"({"format":"tsmin-faultmap","version":1,"versions":[
    {"id":"v1","failing":["AccountTest#testOverdraw"]},
    {"id":"v2","failing":["MathUtilsTest#testGcd","StringUtilsTest#testJoin"]},
    {"id":"v3","failing":["OrderTest#totalOfTwoItems"]}]})");
  std::string corpus = (fs::path(TSMIN_FIXTURES) / "corpus").string();
  std::vector<std::map<std::string, std::string>> runs;
  for (std::string jobs : {"1", "8"}) {
    std::string out = (root / ("jobs" + jobs)).string();
    std::vector<std::vector<std::string>> steps = {
        {"all", corpus, "-o", out, "--measure", "combined,ted", "--seed", "7", "--fault-map",
         (root / "faults.json").string(), "--random-baseline"},
        {"minimize", "-o", out, "--algorithm", "nsga2", "--measure", "combined,ted", "--seed",
         "7"},
        {"evaluate", "-o", out, "--fault-map", (root / "faults.json").string()},
    };
    for (auto& s : steps) {
      s.insert(s.end(), {"--no-timing", "--jobs", jobs});
      if (run_cli(s) != 0) return {false, "pipeline failed with --jobs " + jobs};
    }
    runs.push_back(snapshot(out));
  }
  std::size_t differing = 0;
  for (const auto& [name, content] : runs[0]) {
    auto it = runs[1].find(name);
    differing += it == runs[1].end() || it->second != content;
  }
  differing += runs[1].size() != runs[0].size();
  fs::remove_all(root);
  return {differing == 0 && !runs[0].empty(),
          std::to_string(runs[0].size()) + " files, " + std::to_string(differing) + " differ"};
}

// Ten structurally distinct test bodies; the two members of a pair differ
// only in one literal.
std::string synthetic_body(int pair, int variant) {
  static const char* blocks[] = {
      "int a = base + %d;\n",
      "for (int i = 0; i < %d; i++) { total += i * step; }\n",
      "if (value > %d) { result = value; } else { result = -value; }\n",
      "list.add(new Item(\"n\", %d));\n",
      "while (count < %d) { count = count * 2 + 1; }\n",
      "String s = prefix + \"-\" + %d;\n",
      "try { service.call(%d); } catch (IllegalStateException e) { failed = true; }\n",
      "map.put(\"k\", map.getOrDefault(\"k\", 0) + %d);\n",
      "do { n = n / 2; } while (n > %d);\n",
      "switch (mode) { case 1: x = %d; break; default: x = 0; }\n",
  };
  std::string body;
  char line[256];
  // Pair k uses blocks k, k+3, k+7 twice over in a pair-specific order.
  int picks[] = {pair, (pair + 3) % 10, (pair + 7) % 10, (pair * 3 + 1) % 10};
  for (int r = 0; r < 2; ++r)
    for (int p : picks) {
      std::snprintf(line, sizeof line, blocks[p], 10 + pair + (r == 1 && p == pair ? variant : 0));
      body += "    " + std::string(line);
    }
  return body;
}

Verdict fault_effectiveness() {
  fs::path root = scratch("synthetic");
  fs::path corpus = root / "corpus";
  eval::FaultMap fm;
  for (int k = 0; k < 10; ++k) {
    std::string cls = "Feature" + std::to_string(k) + "Test";
    std::string src = "public class " + cls + " {\n";
    for (int v = 0; v < 2; ++v) {
      src += "  @Test\n  public void testCase" + std::to_string(v) + "() {\n" +
             synthetic_body(k, v) + "    assertTrue(result >= 0);\n  }\n";
    }
    src += "}\n";
    write_file(corpus / (cls + ".java"), src);
    fm.versions.push_back({"v" + std::to_string(k), {cls + "#testCase0", cls + "#testCase1"}});
  }
  write_file(root / "faults.json", eval::serialize_fault_map(fm));
  std::string out = (root / "out").string();
  if (run_cli({"prepare", corpus.string(), "-o", out}) != 0 ||
      run_cli({"similarity", "-o", out}) != 0 ||
      run_cli({"minimize", "-o", out, "--budget", "0.5", "--seeds", "1..10"}) != 0 ||
      run_cli({"minimize", "-o", out, "--algorithm", "random", "--budget", "0.5", "--seeds",
               "1..10"}) != 0)
    return {false, "pipeline failed"};

  int perfect = 0;
  std::vector<double> random_fdr;
  for (const auto& e : fs::directory_iterator(out)) {
    std::string name = e.path().filename().string();
    if (name.rfind("minimized-", 0) != 0) continue;
    std::string label;
    eval::Suite s = cli::load_suite(e.path(), &label);
    double f = eval::compute_fdr(fm, {s}).fdr;
    if (label.rfind("ga-", 0) == 0) perfect += f == 1.0;
    else random_fdr.push_back(f);
  }
  double mean = eval::describe(random_fdr).mean;
  fs::remove_all(root);
  return {perfect >= 9 && mean >= 0.60 && mean <= 0.90,
          std::to_string(perfect) + " of 10 GA seeds at FDR 1.0, random mean FDR " +
              fmt("%.3f", mean) + " over " + std::to_string(random_fdr.size()) + " seeds"};
}

Verdict incremental_cache() {
  search::Rng rng(12, 0);
  std::vector<MatrixMember> roster;
  std::vector<AstTree> trees;
  for (int i = 0; i < 10; ++i) {
    trees.push_back(oracle::random_tree(rng, 25, 4));
    roster.push_back({"T#t" + std::to_string(i), trees.back().digest()});
  }
  BuildOptions opt;
  SimilarityMatrix before = build_matrix(roster, trees, opt);
  do trees[6] = oracle::random_tree(rng, 25, 4);
  while (trees[6].digest() == roster[6].digest);
  roster[6].digest = trees[6].digest();
  opt.prior = &before;
  BuildReport rep;
  SimilarityMatrix after = build_matrix(roster, trees, opt, &rep);

  // Spot-check a random 10% of the 45 pairs against fresh scores.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < 10; ++i)
    for (std::size_t j = i + 1; j < 10; ++j) pairs.emplace_back(i, j);
  search::Rng pick(13, 0);
  std::size_t checked = 0, wrong = 0;
  for (std::size_t k = 0; k < 5; ++k) {
    std::swap(pairs[k], pairs[k + pick.below(pairs.size() - k)]);
    auto [i, j] = pairs[k];
    ++checked;
    auto fresh = sim::score_pair(trees[i], trees[j], opt.measure);
    wrong += fresh.exact.num != after.exact(i, j).num || fresh.exact.den != after.exact(i, j).den;
  }
  return {rep.computed_pairs == 9 && rep.reused_pairs == 36 && wrong == 0,
          std::to_string(rep.computed_pairs) + " computed, " + std::to_string(rep.reused_pairs) +
              " reused, " + std::to_string(wrong) + " of " + std::to_string(checked) +
              " sampled pairs differ from fresh scores"};
}

Verdict fisher() {
  search::Rng rng(99, 0);
  double worst = 0.0;
  int tables = 0;
  while (tables < 100) {
    std::uint64_t a = rng.below(31), b = rng.below(31), c = rng.below(31), d = rng.below(31);
    if (a + b == 0 || c + d == 0 || a + b > 30 || c + d > 30) continue;
    worst = std::max(worst, std::abs(eval::fisher_exact(a, b, c, d) - oracle::fisher_p(a, b, c, d)));
    ++tables;
  }
  bool symmetric = std::abs(eval::fisher_exact(10, 5, 10, 5) - 1.0) < 1e-12 &&
                   std::abs(eval::fisher_exact(3, 3, 3, 3) - 1.0) < 1e-12;
  bool odds = eval::odds_ratio(4, 2, 8, 4).value == 1.0 && eval::odds_ratio(6, 3, 6, 3).value == 1.0;
  return {worst <= 1e-10 && symmetric && odds,
          fmt("max |dp| %.3g over 100 tables", worst) + (symmetric ? "" : ", symmetric p != 1") +
              (odds ? "" : ", odds ratio != 1")};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Verdict()> check;
    double limit_seconds;  // 0 = no runtime limit
  };
  std::vector<Criterion> criteria = {
      {"preprocessing reproduces the golden listing", golden_listing, 1},
      {"similarity axioms for all measures", axioms, 120},
      {"measures agree with brute-force oracles", oracles, 300},
      {"score formulas", formulas, 0},
      {"GA reaches the exhaustive optimum on toy instances", ga_optimum, 60},
      {"search invariants", invariants, 0},
      {"byte-identical artifacts across job counts", determinism, 0},
      {"near-duplicate corpus: GA vs random fault detection", fault_effectiveness, 300},
      {"incremental similarity cache", incremental_cache, 0},
      {"Fisher test and odds ratio", fisher, 0},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    auto start = Clock::now();
    try {
      v = criteria[i].check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    double s = std::chrono::duration<double>(Clock::now() - start).count();
    if (criteria[i].limit_seconds > 0 && s >= criteria[i].limit_seconds) {
      v.pass = false;
      v.detail += ", over the time limit";
    }
    v.detail += fmt(", %.2f s", s);
    failed += !v.pass;
    std::printf("%s criterion %zu: %s (%s)\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].name,
                v.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
