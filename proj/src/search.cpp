#include "tsmin/search.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <string>
#include <thread>

#include "tsmin/error.hpp"

namespace tsmin::search {

namespace {

constexpr std::pair<Algorithm, std::string_view> kAlgorithms[] = {
    {Algorithm::GA, "ga"}, {Algorithm::NSGA2, "nsga2"}, {Algorithm::Random, "random"}};

constexpr std::pair<FitnessForm, std::string_view> kForms[] = {
    {FitnessForm::MaxSquared, "max_squared"},
    {FitnessForm::Max, "max"},
    {FitnessForm::PairwiseMean, "pairwise_mean"},
    {FitnessForm::PairwiseMeanSquared, "pairwise_mean_squared"},
};

using Clock = std::chrono::steady_clock;

double elapsed(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Runs fn(k) for k in [0, count). Each k writes only its own slot.
template <typename Fn>
void parallel_for(std::size_t count, unsigned jobs, Fn fn) {
  if (jobs <= 1 || count < 2) {
    for (std::size_t k = 0; k < count; ++k) fn(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k = next++; k < count; k = next++) fn(k);
  };
  std::vector<std::thread> pool;
  unsigned n = static_cast<unsigned>(std::min<std::size_t>(jobs, count));
  for (unsigned t = 0; t < n; ++t) pool.emplace_back(work);
  for (auto& t : pool) t.join();
}

void check_size(const Selection& s, std::size_t n, const char* op) {
  if (popcount(s) != n)
    throw Error(ErrorKind::Undefined, std::string(op) + " broke the subset size");
}

// Parents first, then offspring; a stable sort keeps that order at ties.
std::vector<std::size_t> unique_order(const std::vector<Candidate>& all,
                                      std::vector<std::size_t> order) {
  std::set<Selection> seen;
  std::vector<std::size_t> unique;
  std::vector<std::size_t> dups;
  for (std::size_t k : order) {
    if (seen.insert(all[k].bits).second)
      unique.push_back(k);
    else
      dups.push_back(k);
  }
  unique.insert(unique.end(), dups.begin(), dups.end());
  return unique;
}

struct Objectives {
  std::vector<MatrixView> views;
  FitnessForm form;
  unsigned jobs;

  void evaluate(std::vector<Candidate>& pop, std::size_t from) const {
    parallel_for(pop.size() - from, jobs, [&](std::size_t k) {
      Candidate& c = pop[from + k];
      c.fitness.resize(views.size());
      for (std::size_t o = 0; o < views.size(); ++o)
        c.fitness[o] = fitness(c.bits, views[o], form);
    });
  }
};

std::vector<Candidate> initial_population(std::size_t total, std::size_t n,
                                          const SearchConfig& cfg) {
  Rng rng(cfg.seed, 0);
  std::vector<Candidate> pop(cfg.population_size);
  for (auto& c : pop) c.bits = random_subset(total, n, rng);
  return pop;
}

// Appends population_size offspring built from `pop`.
template <typename Select>
void breed(std::vector<Candidate>& pop, std::size_t parents, std::size_t n,
           const SearchConfig& cfg, Rng& rng, Select select) {
  pop.reserve(parents * 2);
  std::vector<Candidate> parent_view(pop.begin(), pop.begin() + static_cast<long>(parents));
  while (pop.size() < parents * 2) {
    std::size_t a = select(parent_view, rng);
    std::size_t b = select(parent_view, rng);
    auto [c1, c2] = crossover(parent_view[a].bits, parent_view[b].bits, rng, cfg.crossover_rate);
    check_size(c1, n, "crossover");
    check_size(c2, n, "crossover");
    mutate(c1, rng, cfg.mutation_rate);
    mutate(c2, rng, cfg.mutation_rate);
    check_size(c1, n, "mutation");
    check_size(c2, n, "mutation");
    pop.push_back({std::move(c1), {}, 0, 0.0});
    if (pop.size() < parents * 2) pop.push_back({std::move(c2), {}, 0, 0.0});
  }
}

bool lex_members(const Selection& a, const Selection& b) {
  // Lexicographic on sorted member lists: the first position where the
  // selections differ decides; the one containing that index is smaller.
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return a[i] > b[i];
  return false;
}

double best_first(const std::vector<Candidate>& pop) {
  double b = std::numeric_limits<double>::infinity();
  for (const auto& c : pop) b = std::min(b, c.fitness[0]);
  return b;
}

}  // namespace

std::string_view to_string(Algorithm a) {
  for (const auto& [k, n] : kAlgorithms)
    if (k == a) return n;
  return "unknown";
}

Algorithm parse_algorithm(std::string_view name) {
  for (const auto& [k, n] : kAlgorithms)
    if (n == name) return k;
  throw Error(ErrorKind::Config, "unknown algorithm '" + std::string(name) +
                                     "' (expected ga, nsga2 or random)");
}

std::string_view to_string(FitnessForm f) {
  for (const auto& [k, n] : kForms)
    if (k == f) return n;
  return "unknown";
}

FitnessForm parse_fitness_form(std::string_view name) {
  for (const auto& [k, n] : kForms)
    if (n == name) return k;
  throw Error(ErrorKind::Config, "unknown fitness form '" + std::string(name) + "'");
}

void validate(const SearchConfig& c) {
  auto bad = [](const std::string& what) { throw Error(ErrorKind::Config, what); };
  if (!(c.budget_fraction > 0.0 && c.budget_fraction < 1.0))
    bad("budget must lie strictly between 0 and 1");
  if (c.population_size < 2) bad("population size must be at least 2");
  if (!(c.crossover_rate >= 0.0 && c.crossover_rate <= 1.0))
    bad("crossover rate must lie in [0,1]");
  if (!(c.mutation_rate >= 0.0 && c.mutation_rate <= 1.0))
    bad("mutation rate must lie in [0,1]");
  if (!(c.improvement_epsilon >= 0.0)) bad("improvement epsilon must be non-negative");
}

std::size_t budget_size(std::size_t total, double fraction) {
  if (!(fraction > 0.0 && fraction < 1.0))
    throw Error(ErrorKind::Config, "budget must lie strictly between 0 and 1");
  auto n = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(total)));
  if (n < 2 || n >= total)
    throw Error(ErrorKind::Config,
                "budget " + std::to_string(fraction) + " of " + std::to_string(total) +
                    " tests gives a subset of " + std::to_string(n) +
                    "; need at least 2 and fewer than all tests");
  return n;
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(stream >> 32)};
  engine_.seed(seq);
}

std::uint64_t Rng::below(std::uint64_t bound) {
  const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t limit = max - (max % bound + 1) % bound;
  std::uint64_t x;
  do x = engine_();
  while (x > limit);
  return x % bound;
}

double Rng::unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::size_t popcount(const Selection& s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), std::uint8_t{1}));
}

std::vector<std::size_t> members(const Selection& s) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s[i]) out.push_back(i);
  return out;
}

Selection from_members(std::size_t total, const std::vector<std::size_t>& idx) {
  Selection s(total, 0);
  for (std::size_t i : idx) s.at(i) = 1;
  return s;
}

double fitness(const Selection& s, const MatrixView& m, FitnessForm form) {
  if (s.size() != m.n)
    throw Error(ErrorKind::Config, "selection length " + std::to_string(s.size()) +
                                       " does not match matrix size " + std::to_string(m.n));
  std::vector<std::size_t> idx = members(s);
  std::size_t n = idx.size();
  if (n < 2) throw Error(ErrorKind::Undefined, "fitness needs at least two selected tests");
  double total = 0.0;
  switch (form) {
    case FitnessForm::MaxSquared:
    case FitnessForm::Max:
      for (std::size_t a = 0; a < n; ++a) {
        double best = 0.0;
        for (std::size_t b = 0; b < n; ++b)
          if (a != b) best = std::max(best, m.at(idx[a], idx[b]));
        total += form == FitnessForm::MaxSquared ? best * best : best;
      }
      return total / static_cast<double>(n);
    case FitnessForm::PairwiseMean:
    case FitnessForm::PairwiseMeanSquared:
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b) {
          double v = m.at(idx[a], idx[b]);
          total += form == FitnessForm::PairwiseMeanSquared ? v * v : v;
        }
      return total / (static_cast<double>(n) * static_cast<double>(n - 1) / 2.0);
  }
  throw Error(ErrorKind::Config, "unknown fitness form");
}

std::size_t tournament(const std::vector<Candidate>& pop, Rng& rng) {
  std::size_t a = rng.below(pop.size());
  std::size_t b = rng.below(pop.size());
  return pop[b].fitness[0] < pop[a].fitness[0] ? b : a;
}

std::size_t crowded_tournament(const std::vector<Candidate>& pop, Rng& rng) {
  std::size_t a = rng.below(pop.size());
  std::size_t b = rng.below(pop.size());
  if (pop[b].rank != pop[a].rank) return pop[b].rank < pop[a].rank ? b : a;
  return pop[b].crowding > pop[a].crowding ? b : a;
}

std::pair<Selection, Selection> crossover(const Selection& a, const Selection& b, Rng& rng,
                                          double rate) {
  if (a.size() != b.size()) throw Error(ErrorKind::Config, "parents differ in length");
  if (!rng.chance(rate)) return {a, b};
  std::size_t n = popcount(a);
  Selection base(a.size(), 0);
  std::vector<std::size_t> pool;
  std::size_t common = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] && b[i]) {
      base[i] = 1;
      ++common;
    } else if (a[i] || b[i]) {
      pool.push_back(i);
    }
  }
  auto child = [&] {
    Selection c = base;
    std::vector<std::size_t> p = pool;
    std::size_t need = n - common;
    for (std::size_t k = 0; k < need; ++k) {
      std::size_t r = k + rng.below(p.size() - k);
      std::swap(p[k], p[r]);
      c[p[k]] = 1;
    }
    return c;
  };
  Selection c1 = child();
  Selection c2 = child();
  return {std::move(c1), std::move(c2)};
}

void reverse_segment(Selection& s, std::size_t i, std::size_t j) {
  std::reverse(s.begin() + static_cast<long>(i), s.begin() + static_cast<long>(j) + 1);
}

void mutate(Selection& s, Rng& rng, double rate) {
  if (s.size() < 2 || !rng.chance(rate)) return;
  std::size_t i;
  std::size_t j;
  do {
    i = rng.below(s.size());
    j = rng.below(s.size());
  } while (i == j);
  if (i > j) std::swap(i, j);
  reverse_segment(s, i, j);
}

Selection random_subset(std::size_t total, std::size_t n, Rng& rng) {
  std::vector<std::size_t> idx(total);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Selection s(total, 0);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t r = k + rng.below(total - k);
    std::swap(idx[k], idx[r]);
    s[idx[k]] = 1;
  }
  return s;
}

bool dominates(const std::vector<double>& a, const std::vector<double>& b) {
  bool better = false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k] > b[k]) return false;
    if (a[k] < b[k]) better = true;
  }
  return better;
}

std::vector<std::vector<std::size_t>> non_dominated_sort(std::vector<Candidate>& pop) {
  std::size_t n = pop.size();
  std::vector<std::vector<std::size_t>> dominated(n);
  std::vector<std::size_t> count(n, 0);
  std::vector<std::vector<std::size_t>> fronts(1);
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = 0; q < n; ++q) {
      if (p == q) continue;
      if (dominates(pop[p].fitness, pop[q].fitness))
        dominated[p].push_back(q);
      else if (dominates(pop[q].fitness, pop[p].fitness))
        ++count[p];
    }
    if (count[p] == 0) {
      pop[p].rank = 0;
      fronts[0].push_back(p);
    }
  }
  for (std::size_t f = 0; !fronts[f].empty(); ++f) {
    std::vector<std::size_t> next;
    for (std::size_t p : fronts[f])
      for (std::size_t q : dominated[p])
        if (--count[q] == 0) {
          pop[q].rank = f + 1;
          next.push_back(q);
        }
    std::sort(next.begin(), next.end());
    fronts.push_back(std::move(next));
  }
  fronts.pop_back();
  return fronts;
}

void assign_crowding(std::vector<Candidate>& pop, const std::vector<std::size_t>& front) {
  for (std::size_t i : front) pop[i].crowding = 0.0;
  if (front.empty()) return;
  const double inf = std::numeric_limits<double>::infinity();
  std::size_t objectives = pop[front[0]].fitness.size();
  for (std::size_t o = 0; o < objectives; ++o) {
    std::vector<std::size_t> order = front;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return pop[a].fitness[o] < pop[b].fitness[o];
    });
    double lo = pop[order.front()].fitness[o];
    double hi = pop[order.back()].fitness[o];
    pop[order.front()].crowding = inf;
    pop[order.back()].crowding = inf;
    if (hi - lo <= 0.0) continue;
    for (std::size_t k = 1; k + 1 < order.size(); ++k) {
      double gap = pop[order[k + 1]].fitness[o] - pop[order[k - 1]].fitness[o];
      pop[order[k]].crowding += gap / (hi - lo);
    }
  }
}

std::size_t knee_point(const std::vector<Candidate>& front) {
  if (front.empty()) throw Error(ErrorKind::Undefined, "empty front has no knee point");
  std::size_t objectives = front[0].fitness.size();
  std::vector<double> lo(objectives, std::numeric_limits<double>::infinity());
  std::vector<double> hi(objectives, -std::numeric_limits<double>::infinity());
  for (const auto& c : front)
    for (std::size_t o = 0; o < objectives; ++o) {
      lo[o] = std::min(lo[o], c.fitness[o]);
      hi[o] = std::max(hi[o], c.fitness[o]);
    }
  auto score = [&](const Candidate& c) {
    double s = 0.0;
    for (std::size_t o = 0; o < objectives; ++o)
      if (hi[o] > lo[o]) s += (c.fitness[o] - lo[o]) / (hi[o] - lo[o]);
    return s;
  };
  std::size_t best = 0;
  double best_score = score(front[0]);
  for (std::size_t k = 1; k < front.size(); ++k) {
    double s = score(front[k]);
    const Candidate& c = front[k];
    const Candidate& b = front[best];
    bool better = s < best_score ||
                  (s == best_score && (c.fitness[0] < b.fitness[0] ||
                                       (c.fitness[0] == b.fitness[0] && lex_members(c.bits, b.bits))));
    if (better) {
      best = k;
      best_score = s;
    }
  }
  return best;
}

MinimizationResult run_ga(const MatrixView& m, const SearchConfig& cfg) {
  validate(cfg);
  auto start = Clock::now();
  std::size_t total = m.n;
  std::size_t n = budget_size(total, cfg.budget_fraction);
  Objectives obj{{m}, cfg.fitness_form, cfg.jobs};

  std::vector<Candidate> pop = initial_population(total, n, cfg);
  obj.evaluate(pop, 0);
  std::size_t P = cfg.population_size;
  auto survive = [&](std::vector<Candidate>& all) {
    std::vector<std::size_t> order(all.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return all[a].fitness[0] < all[b].fitness[0];
    });
    order = unique_order(all, std::move(order));
    std::vector<Candidate> next;
    next.reserve(P);
    for (std::size_t k = 0; k < P; ++k) next.push_back(std::move(all[order[k]]));
    std::stable_sort(next.begin(), next.end(), [](const Candidate& a, const Candidate& b) {
      return a.fitness[0] < b.fitness[0];
    });
    all = std::move(next);
  };
  // Order the initial population the same way survivors are ordered.
  std::stable_sort(pop.begin(), pop.end(), [](const Candidate& a, const Candidate& b) {
    return a.fitness[0] < b.fitness[0];
  });

  MinimizationResult res;
  res.algorithm = Algorithm::GA;
  res.total = total;
  res.budget = n;
  double prev = pop[0].fitness[0];
  res.trace.push_back(prev);
  std::size_t gen = 0;
  while (true) {
    ++gen;
    Rng rng(cfg.seed, gen);
    breed(pop, P, n, cfg, rng, tournament);
    obj.evaluate(pop, P);
    survive(pop);
    double best = pop[0].fitness[0];
    res.trace.push_back(best);
    if (gen >= cfg.min_generations && prev - best < cfg.improvement_epsilon) break;
    prev = best;
  }
  res.generations = gen;
  res.best = pop[0].bits;
  res.best_fitness = pop[0].fitness;
  res.seconds = elapsed(start);
  return res;
}

MinimizationResult run_nsga2(const MatrixView& first, const MatrixView& second,
                             const SearchConfig& cfg) {
  validate(cfg);
  if (first.n != second.n)
    throw Error(ErrorKind::Config, "NSGA-II objectives cover different rosters");
  auto start = Clock::now();
  std::size_t total = first.n;
  std::size_t n = budget_size(total, cfg.budget_fraction);
  Objectives obj{{first, second}, cfg.fitness_form, cfg.jobs};
  std::size_t P = cfg.population_size;

  auto rank_all = [](std::vector<Candidate>& pop) {
    for (const auto& front : non_dominated_sort(pop)) assign_crowding(pop, front);
  };

  std::vector<Candidate> pop = initial_population(total, n, cfg);
  obj.evaluate(pop, 0);
  rank_all(pop);

  auto survive = [&](std::vector<Candidate>& all) {
    std::vector<std::size_t> order(all.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    order = unique_order(all, std::move(order));
    std::size_t uniques = 0;
    {
      std::set<Selection> seen;
      for (const auto& c : all) uniques += seen.insert(c.bits).second;
    }
    std::vector<Candidate> next;
    if (uniques >= P) {
      std::vector<Candidate> u;
      for (std::size_t k = 0; k < uniques; ++k) u.push_back(std::move(all[order[k]]));
      auto fronts = non_dominated_sort(u);
      for (const auto& front : fronts) {
        assign_crowding(u, front);
        if (next.size() + front.size() <= P) {
          for (std::size_t i : front) next.push_back(u[i]);
          continue;
        }
        std::vector<std::size_t> f = front;
        std::stable_sort(f.begin(), f.end(), [&](std::size_t a, std::size_t b) {
          return u[a].crowding > u[b].crowding;
        });
        for (std::size_t k = 0; next.size() < P; ++k) next.push_back(u[f[k]]);
        break;
      }
    } else {
      for (std::size_t k = 0; k < P; ++k) next.push_back(std::move(all[order[k]]));
    }
    rank_all(next);
    all = std::move(next);
  };

  MinimizationResult res;
  res.algorithm = Algorithm::NSGA2;
  res.total = total;
  res.budget = n;
  double prev = best_first(pop);
  res.trace.push_back(prev);
  std::size_t gen = 0;
  while (true) {
    ++gen;
    Rng rng(cfg.seed, gen);
    breed(pop, P, n, cfg, rng, crowded_tournament);
    obj.evaluate(pop, P);
    survive(pop);
    double best = best_first(pop);
    res.trace.push_back(best);
    if (gen >= cfg.min_generations && prev - best < cfg.improvement_epsilon) break;
    prev = best;
  }

  std::set<Selection> seen;
  for (const auto& c : pop)
    if (c.rank == 0 && seen.insert(c.bits).second) res.front.push_back(c);
  std::stable_sort(res.front.begin(), res.front.end(),
                   [](const Candidate& a, const Candidate& b) { return a.fitness < b.fitness; });
  res.designated = knee_point(res.front);
  res.generations = gen;
  res.best = res.front[res.designated].bits;
  res.best_fitness = res.front[res.designated].fitness;
  res.seconds = elapsed(start);
  return res;
}

MinimizationResult run_random(std::size_t total, const SearchConfig& cfg, const MatrixView* m) {
  if (!(cfg.budget_fraction > 0.0 && cfg.budget_fraction < 1.0))
    throw Error(ErrorKind::Config, "budget must lie strictly between 0 and 1");
  auto start = Clock::now();
  auto n = static_cast<std::size_t>(
      std::llround(cfg.budget_fraction * static_cast<double>(total)));
  if (n < 1 || n > total)
    throw Error(ErrorKind::Config, "budget gives an empty subset of " +
                                       std::to_string(total) + " tests");
  Rng rng(cfg.seed, 0);
  MinimizationResult res;
  res.algorithm = Algorithm::Random;
  res.total = total;
  res.budget = n;
  res.best = random_subset(total, n, rng);
  if (m && n >= 2) res.best_fitness = {fitness(res.best, *m, cfg.fitness_form)};
  res.seconds = elapsed(start);
  return res;
}

}  // namespace tsmin::search
