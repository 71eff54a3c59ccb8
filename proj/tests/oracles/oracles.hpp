#pragma once

// Slow, definition-level reference implementations used to check the
// library. They share only the AstTree accessors with the code under test.

#include <cstdint>
#include <vector>

#include "tsmin/search.hpp"
#include "tsmin/tree.hpp"

namespace oracle {

/// Random tree with 1..max_nodes nodes; node k hangs below a uniform earlier
/// node. `alphabet` (1..8) limits how many distinct labels are used.
tsmin::AstTree random_tree(tsmin::search::Rng& rng, std::size_t max_nodes, int alphabet);

/// Nodes reachable by the same child-position path in both trees with equal
/// labels along the whole path.
std::size_t top_down_size(const tsmin::AstTree& a, const tsmin::AstTree& b);

/// Largest pair of isomorphic complete subtrees, by direct comparison of
/// every node pair.
std::size_t bottom_up_size(const tsmin::AstTree& a, const tsmin::AstTree& b);

/// Minimum cost over edit scripts in normal form: delete a node set from a,
/// delete a node set from b (the insertions, reversed), and relabel the two
/// remaining forests, which must have the same shape. Exponential; keep the
/// trees at 6 nodes or fewer.
std::size_t edit_distance(const tsmin::AstTree& a, const tsmin::AstTree& b);

/// Sum over members of the largest squared similarity to another member,
/// divided by the member count.
double fitness(const std::vector<int>& members, const std::vector<std::vector<double>>& sim);

/// Minimum fitness over all n-subsets of {0..N-1}.
double exhaustive_minimum(const std::vector<std::vector<double>>& sim, std::size_t n);

/// Two-sided Fisher p from exact integer table weights.
double fisher_p(std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d);

/// Symmetric matrix with uniform off-diagonal entries and a unit diagonal.
std::vector<std::vector<double>> random_matrix(std::size_t n, std::uint64_t seed);

}  // namespace oracle
