#pragma once

#include <span>
#include <vector>

#include "tbrkit/phylo_tree.hpp"

namespace tbrkit {

/// A sequence of taxa whose parents form a walk p_1..p_n. Consecutive parents
/// may coincide only at the two ends (a cherry at either end of the chain);
/// otherwise the parents are distinct and trace a simple path.
struct ChainDescriptor {
  std::vector<Taxon> taxa;
  std::vector<Vertex> walk_first;   // parent walk in the first tree
  std::vector<Vertex> walk_second;  // parent walk in the second tree
  bool pendant_first = false;
  bool pendant_second = false;

  std::size_t size() const { return taxa.size(); }
};

/// Parent walk of `seq` if it is a chain of `tree`, empty otherwise. Chains
/// are only defined on trees with at least four taxa.
std::vector<Vertex> chain_walk(const PhyloTree& tree, std::span<const Taxon> seq);
bool is_chain(const PhyloTree& tree, std::span<const Taxon> seq);
bool is_pendant_chain(const PhyloTree& tree, std::span<const Taxon> seq);
bool is_common_chain(const TreePair& pair, std::span<const Taxon> seq);

/// Every chain of `tree` with exactly `len` taxa, in both directions, sorted.
std::vector<std::vector<Taxon>> enumerate_chains(const PhyloTree& tree, int len);

/// Maximal common chains with at least `min_len` taxa. A chain is maximal when
/// no taxon can be added at either end so that it stays common. Each chain is
/// reported once, oriented so that its first taxon is smaller than its last,
/// and the list is sorted by taxa sequence.
std::vector<ChainDescriptor> find_common_chains(const TreePair& pair, int min_len);

/// Maximal taxon sets S with |S| >= 2 that hang off a single edge in both trees
/// with the same rooted shape. Sorted by their (sorted) taxa.
std::vector<std::vector<Taxon>> find_common_pendant_subtrees(const TreePair& pair);

}  // namespace tbrkit
