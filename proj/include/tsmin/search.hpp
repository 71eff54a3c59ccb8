#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

namespace tsmin::search {

enum class Algorithm : std::uint8_t { GA, NSGA2, Random };

std::string_view to_string(Algorithm a);
/// "ga", "nsga2" or "random"; anything else throws Error{Config}.
Algorithm parse_algorithm(std::string_view name);

/// How the per-subset similarity is aggregated. MaxSquared is the default;
/// the others are kept for comparison runs.
enum class FitnessForm : std::uint8_t {
  MaxSquared,           // sum_i max_{j!=i} s_ij^2 / n
  Max,                  // sum_i max_{j!=i} s_ij / n
  PairwiseMean,         // mean of s_ij over unordered pairs
  PairwiseMeanSquared,  // mean of s_ij^2 over unordered pairs
};

std::string_view to_string(FitnessForm f);
FitnessForm parse_fitness_form(std::string_view name);

struct SearchConfig {
  double budget_fraction = 0.5;
  std::size_t population_size = 100;
  double crossover_rate = 0.90;
  double mutation_rate = 0.01;
  std::size_t min_generations = 30;
  double improvement_epsilon = 0.0025;
  std::uint64_t seed = 1;
  Algorithm algorithm = Algorithm::GA;
  FitnessForm fitness_form = FitnessForm::MaxSquared;
  /// Threads for fitness evaluation. Never changes the result.
  unsigned jobs = 1;
};

/// Checks ranges of the rates and sizes. Throws Error{Config}.
void validate(const SearchConfig& config);

/// n = round(fraction * N). Throws Error{Config} unless 2 <= n < N.
std::size_t budget_size(std::size_t total, double fraction);

/// Seeded generator. Each (seed, stream) pair gives an independent sequence;
/// the engine is mt19937_64 keyed through seed_seq, both fully specified by
/// the C++ standard, and the helpers below avoid the implementation-defined
/// standard distributions.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next() { return engine_(); }
  /// Uniform in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound);
  /// Uniform in [0, 1) with 53 bits.
  double unit();
  bool chance(double p) { return p >= 1.0 || (p > 0.0 && unit() < p); }

 private:
  std::mt19937_64 engine_;
};

using Selection = std::vector<std::uint8_t>;  // one 0/1 entry per roster index

std::size_t popcount(const Selection& s);
std::vector<std::size_t> members(const Selection& s);
Selection from_members(std::size_t total, const std::vector<std::size_t>& idx);

/// Row-major view of a symmetric score matrix.
struct MatrixView {
  std::size_t n = 0;
  const double* data = nullptr;

  MatrixView() = default;
  MatrixView(std::size_t size, const std::vector<double>& values)
      : n(size), data(values.data()) {}
  double at(std::size_t i, std::size_t j) const { return data[i * n + j]; }
};

/// Lower is better. Throws Error{Undefined} for fewer than two members and
/// Error{Config} when the selection length differs from the matrix size.
double fitness(const Selection& s, const MatrixView& m,
               FitnessForm form = FitnessForm::MaxSquared);

struct Candidate {
  Selection bits;
  std::vector<double> fitness;  // one value per objective
  std::size_t rank = 0;         // 0 = first front
  double crowding = 0.0;
};

/// Two uniform draws with replacement; the lower fitness[0] wins, ties go to
/// the first drawn. Returns a population index.
std::size_t tournament(const std::vector<Candidate>& pop, Rng& rng);
/// Crowded comparison: lower rank, then larger crowding, then first drawn.
std::size_t crowded_tournament(const std::vector<Candidate>& pop, Rng& rng);

/// Intersection of the parents plus uniform draws from their symmetric
/// difference. With probability 1 - rate the children are the parents.
std::pair<Selection, Selection> crossover(const Selection& a, const Selection& b, Rng& rng,
                                          double rate);

/// Reverses s[i..=j] for uniform i < j.
void reverse_segment(Selection& s, std::size_t i, std::size_t j);
/// With probability `rate`, one segment reversal at uniform i < j.
void mutate(Selection& s, Rng& rng, double rate);

/// Uniform n-subset of {0..total-1}.
Selection random_subset(std::size_t total, std::size_t n, Rng& rng);

/// a dominates b: no objective worse and at least one better (minimizing).
bool dominates(const std::vector<double>& a, const std::vector<double>& b);
/// Fronts as lists of indices into `pop`; also sets rank.
std::vector<std::vector<std::size_t>> non_dominated_sort(std::vector<Candidate>& pop);
void assign_crowding(std::vector<Candidate>& pop, const std::vector<std::size_t>& front);
/// Index into `front` of the knee point: smallest sum of min-max normalized
/// objectives, then smaller first objective, then lexicographically smaller
/// member list.
std::size_t knee_point(const std::vector<Candidate>& front);

struct MinimizationResult {
  Algorithm algorithm = Algorithm::GA;
  std::size_t total = 0;
  std::size_t budget = 0;
  Selection best;
  std::vector<double> best_fitness;  // empty for an unscored random subset
  /// Best first-objective value after initialization and each generation.
  std::vector<double> trace;
  std::size_t generations = 0;
  double seconds = 0.0;
  /// NSGA-II: final first front (deduplicated); best is front[designated].
  std::vector<Candidate> front;
  std::size_t designated = 0;
};

MinimizationResult run_ga(const MatrixView& m, const SearchConfig& config);
MinimizationResult run_nsga2(const MatrixView& first, const MatrixView& second,
                             const SearchConfig& config);
/// `m` is optional and only used to report the subset's fitness.
MinimizationResult run_random(std::size_t total, const SearchConfig& config,
                              const MatrixView* m = nullptr);

}  // namespace tsmin::search
