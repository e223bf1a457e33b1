#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "tbrkit/phylo_tree.hpp"

namespace tbrkit {

/// Quartet ab|cd, normalized so that each side is sorted and the side holding
/// the smaller taxon comes first.
struct Quartet {
  std::array<Taxon, 2> left;
  std::array<Taxon, 2> right;

  static Quartet make(Taxon a, Taxon b, Taxon c, Taxon d);
  friend bool operator==(const Quartet&, const Quartet&) = default;
  friend auto operator<=>(const Quartet&, const Quartet&) = default;
};

std::string to_string(const Quartet& q, const PhyloTree& tree);

/// Minimal connecting subtree on `keep` with degree-2 vertices suppressed.
PhyloTree restrict_taxa(const PhyloTree& tree, std::span<const Taxon> keep);
PhyloTree restrict_tree(const PhyloTree& tree, std::span<const std::string> keep);

/// Same topology, one label replaced.
PhyloTree relabel(const PhyloTree& tree, Taxon taxon, const std::string& new_label);

/// Topology of one 4-set via a single pass over the tree.
Quartet quartet_topology(const PhyloTree& tree, Taxon a, Taxon b, Taxon c, Taxon d);
Quartet quartet_topology(const PhyloTree& tree, const std::array<std::string, 4>& taxa);

/// All-pairs leaf distances plus shortest-path predecessors, for batched
/// quartet and path queries. Quadratic in the number of taxa.
class LeafPaths {
 public:
  explicit LeafPaths(const PhyloTree& tree);

  int distance(Taxon a, Taxon b) const { return dist_[a * n_ + b]; }
  Quartet topology(Taxon a, Taxon b, Taxon c, Taxon d) const;
  /// Edges on the path between two taxa.
  std::vector<EdgeId> path_edges(Taxon a, Taxon b) const;

 private:
  int n_;
  int nv_;
  std::vector<int> dist_;        // n x n
  std::vector<EdgeId> toward_;   // n x V: edge from v toward taxon a
  std::vector<Vertex> next_;     // n x V: neighbour of v toward taxon a
};

/// Vertex distances from one vertex.
std::vector<int> bfs_distances(const PhyloTree& tree, Vertex from);

/// Vertices of the minimal subtree spanning `taxa` (a single leaf for one taxon).
std::vector<char> spanning_vertices(const PhyloTree& tree, std::span<const Taxon> taxa);

/// Leaf-to-leaf diameter in edges.
int leaf_diameter(const PhyloTree& tree);

}  // namespace tbrkit
