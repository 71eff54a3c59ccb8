#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "oracles.hpp"
#include "tsmin/error.hpp"
#include "tsmin/search.hpp"

using namespace tsmin;
using namespace tsmin::search;

namespace {

std::vector<double> flatten(const std::vector<std::vector<double>>& m) {
  std::vector<double> out;
  for (const auto& row : m) out.insert(out.end(), row.begin(), row.end());
  return out;
}

Selection bits(std::string_view s) {
  Selection out;
  for (char c : s) out.push_back(c == '1');
  return out;
}

Candidate cand(double f, std::size_t rank = 0, double crowd = 0) {
  return Candidate{bits("11"), {f}, rank, crowd};
}

}  // namespace

TEST(Rng, Reproducible) {
  Rng a(1, 0), b(1, 0), c(1, 1), d(2, 0);
  std::uint64_t x = a.next();
  EXPECT_EQ(x, b.next());
  EXPECT_NE(x, c.next());
  EXPECT_NE(x, d.next());
  Rng e(7, 3);
  for (int i = 0; i < 1000; ++i) {
    EXPECT_LT(e.below(7), 7u);
    double u = e.unit();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

TEST(Budget, Rounding) {
  EXPECT_EQ(budget_size(12, 0.5), 6u);
  EXPECT_EQ(budget_size(10, 0.25), 3u);  // 2.5 rounds away from zero
  EXPECT_THROW(budget_size(3, 0.25), Error);
  EXPECT_THROW(budget_size(4, 0.9), Error);
  EXPECT_THROW(budget_size(10, 1.0), Error);
}

TEST(Fitness, Examples) {
  std::vector<double> zero(16, 0.0);
  for (int i = 0; i < 4; ++i) zero[i * 4 + i] = 1.0;
  EXPECT_EQ(fitness(bits("1101"), MatrixView(4, zero)), 0.0);

  std::vector<double> m = {1, 0.5, 0.5, 1};
  EXPECT_DOUBLE_EQ(fitness(bits("11"), MatrixView(2, m)), 0.25);
  EXPECT_DOUBLE_EQ(fitness(bits("11"), MatrixView(2, m), FitnessForm::Max), 0.5);
  EXPECT_DOUBLE_EQ(fitness(bits("11"), MatrixView(2, m), FitnessForm::PairwiseMean), 0.5);
  EXPECT_DOUBLE_EQ(fitness(bits("11"), MatrixView(2, m), FitnessForm::PairwiseMeanSquared), 0.25);
}

TEST(Fitness, UndefinedBelowTwo) {
  std::vector<double> m = {1, 0.5, 0.5, 1};
  try {
    fitness(bits("10"), MatrixView(2, m));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Undefined);
  }
}

TEST(Fitness, MatchesNaiveOracle) {
  auto sim = oracle::random_matrix(20, 4);
  auto flat = flatten(sim);
  MatrixView view(20, flat);
  Rng rng(4, 1);
  for (int k = 0; k < 500; ++k) {
    Selection s = random_subset(20, 8, rng);
    std::vector<int> members;
    for (std::size_t i : search::members(s)) members.push_back(static_cast<int>(i));
    EXPECT_NEAR(fitness(s, view), oracle::fitness(members, sim), 1e-15);
  }
}

TEST(Tournament, LowerFitnessWinsTiesGoFirst) {
  std::vector<Candidate> pop = {cand(0.2), cand(0.4)};
  Rng rng(1, 0);
  for (int k = 0; k < 200; ++k) {
    Rng probe = rng;
    std::size_t a = probe.below(2);
    std::size_t b = probe.below(2);
    std::size_t got = tournament(pop, rng);
    EXPECT_EQ(got, (a == 0 || b == 0) ? 0u : 1u);
  }
  std::vector<Candidate> tie = {cand(0.3), cand(0.3)};
  for (int k = 0; k < 200; ++k) {
    Rng probe = rng;
    std::size_t a = probe.below(2);
    EXPECT_EQ(tournament(tie, rng), a);
  }
}

TEST(Tournament, CrowdedComparison) {
  std::vector<Candidate> pop = {cand(0.9, 1, 100.0), cand(0.1, 0, 0.0)};
  Rng rng(2, 0);
  for (int k = 0; k < 200; ++k) {
    Rng probe = rng;
    std::size_t a = probe.below(2);
    std::size_t b = probe.below(2);
    std::size_t got = crowded_tournament(pop, rng);
    EXPECT_EQ(got, (a == 1 || b == 1) ? 1u : 0u);
  }
  std::vector<Candidate> same = {cand(0.5, 2, 1.0), cand(0.5, 2, 3.0)};
  for (int k = 0; k < 200; ++k) {
    Rng probe = rng;
    std::size_t a = probe.below(2);
    std::size_t b = probe.below(2);
    std::size_t got = crowded_tournament(same, rng);
    EXPECT_EQ(got, (a == 1 || b == 1) ? 1u : 0u);
  }
}

TEST(Crossover, IdenticalParents) {
  Rng rng(3, 0);
  Selection p = bits("101100");
  auto [a, b] = crossover(p, p, rng, 1.0);
  EXPECT_EQ(a, p);
  EXPECT_EQ(b, p);
}

TEST(Crossover, DisjointParentsCoverUnion) {
  Rng rng(4, 0);
  Selection a = bits("1100");
  Selection b = bits("0011");
  std::set<Selection> seen;
  for (int k = 0; k < 2000; ++k) {
    auto [c1, c2] = crossover(a, b, rng, 1.0);
    EXPECT_EQ(popcount(c1), 2u);
    EXPECT_EQ(popcount(c2), 2u);
    seen.insert(c1);
    seen.insert(c2);
  }
  EXPECT_EQ(seen.size(), 6u);  // every 2-subset of the 4-element union
}

TEST(Crossover, KeepsIntersectionAndSize) {
  Rng rng(5, 0);
  for (int k = 0; k < 10000; ++k) {
    Selection a = random_subset(30, 10, rng);
    Selection b = random_subset(30, 10, rng);
    auto [c1, c2] = crossover(a, b, rng, 0.9);
    ASSERT_EQ(popcount(c1), 10u);
    ASSERT_EQ(popcount(c2), 10u);
    for (std::size_t i = 0; i < 30; ++i) {
      if (a[i] && b[i]) ASSERT_TRUE(c1[i] && c2[i]);
      if (!a[i] && !b[i]) ASSERT_TRUE(!c1[i] && !c2[i]);
    }
  }
}

TEST(Crossover, RateZeroCopies) {
  Rng rng(6, 0);
  Selection a = bits("1100"), b = bits("0011");
  auto [c1, c2] = crossover(a, b, rng, 0.0);
  EXPECT_EQ(c1, a);
  EXPECT_EQ(c2, b);
}

TEST(Mutation, SegmentReversal) {
  Selection s = bits("1100");
  reverse_segment(s, 0, 3);
  EXPECT_EQ(s, bits("0011"));
  Selection t = bits("101100");
  reverse_segment(t, 1, 3);
  EXPECT_EQ(t, bits("111000"));
}

TEST(Mutation, PreservesSizeAndRateZero) {
  Rng rng(7, 0);
  for (int k = 0; k < 10000; ++k) {
    Selection s = random_subset(25, 9, rng);
    mutate(s, rng, 1.0);
    ASSERT_EQ(popcount(s), 9u);
  }
  Selection s = random_subset(25, 9, rng);
  Selection copy = s;
  for (int k = 0; k < 1000; ++k) mutate(s, rng, 0.0);
  EXPECT_EQ(s, copy);
}

TEST(Pareto, SortAndCrowding) {
  std::vector<Candidate> pop;
  for (auto f : std::vector<std::vector<double>>{{1, 5}, {2, 3}, {3, 1}, {2, 4}, {4, 4}})
    pop.push_back({bits("11"), f, 0, 0});
  auto fronts = non_dominated_sort(pop);
  ASSERT_EQ(fronts.size(), 3u);
  EXPECT_EQ(fronts[0], (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_EQ(fronts[1], (std::vector<std::size_t>{3}));
  EXPECT_EQ(fronts[2], (std::vector<std::size_t>{4}));
  assign_crowding(pop, fronts[0]);
  EXPECT_TRUE(std::isinf(pop[0].crowding));
  EXPECT_TRUE(std::isinf(pop[2].crowding));
  EXPECT_DOUBLE_EQ(pop[1].crowding, 2.0 / 2.0 + 4.0 / 4.0);
}

TEST(Pareto, KneePoint) {
  std::vector<Candidate> front;
  for (auto f : std::vector<std::vector<double>>{{0, 1}, {0.4, 0.4}, {1, 0}})
    front.push_back({bits("11"), f, 0, 0});
  EXPECT_EQ(knee_point(front), 1u);
  // Tie on the normalized sum: smaller first objective wins.
  std::vector<Candidate> tie;
  for (auto f : std::vector<std::vector<double>>{{1, 0}, {0, 1}})
    tie.push_back({bits("11"), f, 0, 0});
  EXPECT_EQ(knee_point(tie), 1u);
  // Full tie: lexicographically smaller member list wins.
  std::vector<Candidate> same = {{bits("0110"), {1, 1}, 0, 0}, {bits("1010"), {1, 1}, 0, 0}};
  EXPECT_EQ(knee_point(same), 1u);
}

TEST(GA, DeterministicMonotoneAndTerminates) {
  auto sim = oracle::random_matrix(30, 8);
  auto flat = flatten(sim);
  MatrixView view(30, flat);
  SearchConfig cfg;
  cfg.seed = 3;
  auto r1 = run_ga(view, cfg);
  auto r2 = run_ga(view, cfg);
  EXPECT_EQ(r1.best, r2.best);
  EXPECT_EQ(r1.trace, r2.trace);
  EXPECT_GE(r1.generations, 30u);
  EXPECT_EQ(popcount(r1.best), 15u);
  for (std::size_t i = 1; i < r1.trace.size(); ++i) EXPECT_LE(r1.trace[i], r1.trace[i - 1]);
  EXPECT_DOUBLE_EQ(r1.best_fitness[0], fitness(r1.best, view));
  cfg.jobs = 4;
  auto r3 = run_ga(view, cfg);
  EXPECT_EQ(r1.best, r3.best);
  EXPECT_EQ(r1.trace, r3.trace);
}

TEST(GA, ExhaustiveOptimumOnToyInstances) {
  int hits = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto sim = oracle::random_matrix(12, seed);
    auto flat = flatten(sim);
    SearchConfig cfg;
    cfg.seed = seed;
    auto r = run_ga(MatrixView(12, flat), cfg);
    double best = oracle::exhaustive_minimum(sim, 6);
    EXPECT_GE(r.best_fitness[0], best - 1e-12);
    hits += std::abs(r.best_fitness[0] - best) <= 1e-12;
  }
  EXPECT_GE(hits, 8);
}

TEST(GA, ConfigErrors) {
  std::vector<double> m(9, 0.5);
  SearchConfig cfg;
  cfg.budget_fraction = 0.2;
  EXPECT_THROW(run_ga(MatrixView(3, m), cfg), Error);
  cfg.budget_fraction = 0.5;
  cfg.crossover_rate = 2.0;
  EXPECT_THROW(run_ga(MatrixView(3, m), cfg), Error);
}

TEST(NSGA2, FrontIsNonDominatedAndDeterministic) {
  auto a = flatten(oracle::random_matrix(20, 1));
  auto b = flatten(oracle::random_matrix(20, 2));
  SearchConfig cfg;
  cfg.seed = 5;
  auto r1 = run_nsga2(MatrixView(20, a), MatrixView(20, b), cfg);
  auto r2 = run_nsga2(MatrixView(20, a), MatrixView(20, b), cfg);
  ASSERT_FALSE(r1.front.empty());
  for (const auto& x : r1.front)
    for (const auto& y : r1.front) EXPECT_FALSE(dominates(x.fitness, y.fitness));
  ASSERT_EQ(r1.front.size(), r2.front.size());
  for (std::size_t i = 0; i < r1.front.size(); ++i) EXPECT_EQ(r1.front[i].bits, r2.front[i].bits);
  EXPECT_EQ(r1.best, r2.best);
  EXPECT_GE(r1.generations, 30u);
}

TEST(NSGA2, DegenerateEqualsGA) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto m = flatten(oracle::random_matrix(12, seed));
    MatrixView v(12, m);
    SearchConfig cfg;
    cfg.seed = seed;
    auto ga = run_ga(v, cfg);
    auto ns = run_nsga2(v, v, cfg);
    EXPECT_NEAR(ns.best_fitness[0], ga.best_fitness[0], 0.0025) << seed;
  }
}

TEST(NSGA2, RosterMismatch) {
  std::vector<double> a(16, 0.5), b(25, 0.5);
  try {
    run_nsga2(MatrixView(4, a), MatrixView(5, b), SearchConfig{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Config);
  }
}

TEST(Random, ReproducibleAndUniform) {
  SearchConfig cfg;
  cfg.budget_fraction = 0.25;
  cfg.seed = 9;
  auto r1 = run_random(20, cfg);
  auto r2 = run_random(20, cfg);
  EXPECT_EQ(r1.best, r2.best);
  EXPECT_EQ(popcount(r1.best), 5u);

  // Frequency of each index over 10k draws is within 3 sigma of n/N.
  const int draws = 10000;
  std::vector<int> count(20, 0);
  for (int s = 0; s < draws; ++s) {
    cfg.seed = 1000 + static_cast<std::uint64_t>(s);
    for (std::size_t i : members(run_random(20, cfg).best)) ++count[i];
  }
  double p = 5.0 / 20.0;
  double sigma = std::sqrt(draws * p * (1 - p));
  for (int c : count) EXPECT_LE(std::abs(c - draws * p), 3 * sigma);
}
