#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

#include "tbrkit/phylo_tree.hpp"

namespace tbrkit {

using Rng = std::mt19937_64;

/// splitmix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x);

/// Seed for a labelled substream, e.g. derive_seed(root, {cell, replicate, 1}).
/// Each path element is mixed in turn, so distinct paths give unrelated seeds.
std::uint64_t derive_seed(std::uint64_t root, std::initializer_list<std::uint64_t> path);

/// Uniform integer in [0, n) by rejection; portable across standard libraries.
std::uint64_t uniform_below(Rng& rng, std::uint64_t n);
/// Uniform double in [0, 1) from the top 53 bits.
double uniform_unit(Rng& rng);

/// Where the two halves of a cut tree can be reattached. After deleting the cut
/// edge and suppressing its endpoints, each half is a tree whose edges are
/// listed here by one representative edge of the original tree. An empty list
/// means that half is a single leaf.
struct TbrSides {
  EdgeId cut;
  std::array<Vertex, 2> root;  // endpoints of the cut edge (u side, v side)
  std::array<std::vector<EdgeId>, 2> attach;
};

TbrSides tbr_sides(const PhyloTree& tree, EdgeId cut);

/// Deletes `cut`, subdivides attach[0][attach_u] and attach[1][attach_v] (or
/// uses the leaf itself when a side is a single leaf, index -1) and joins the
/// two new vertices.
PhyloTree apply_tbr_move(const PhyloTree& tree, EdgeId cut, int attach_u, int attach_v);

/// One move with the cut edge and both attachment points drawn uniformly.
PhyloTree random_tbr_move(const PhyloTree& tree, Rng& rng);

/// k independent random moves. The result is within TBR distance k.
PhyloTree random_tbr_walk(const PhyloTree& tree, int k, Rng& rng);

/// Random tree on taxa "1".."t": taxa are split recursively, each going left
/// with probability skew/100. A split with an empty side is redrawn; at skew 0
/// or 100 one uniformly chosen taxon is sent to the other side instead.
PhyloTree random_tree(int t, int skew, Rng& rng);

/// Caterpillar with leaves in the given order.
PhyloTree caterpillar(const std::vector<std::string>& order);

}  // namespace tbrkit
