#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tbrkit/maf_solver.hpp"

namespace tbrkit {

/// Taxa split off by a single edge in both trees, with both sides of size >= 2.
struct ClusterSplit {
  std::vector<Taxon> cluster;     // the smaller side
  std::vector<Taxon> complement;
  EdgeId split_edge_first = -1;
  EdgeId split_edge_second = -1;
};

/// The most balanced common cluster (largest smaller side), ties to the
/// lexicographically smallest cluster.
std::optional<ClusterSplit> find_common_cluster(const TreePair& pair);

/// The two sides, each with a placeholder leaf standing for the other side.
struct PlaceholderPair {
  TreePair inner;  // cluster plus rho1
  TreePair outer;  // complement plus rho2
  std::string rho1;
  std::string rho2;
};

PlaceholderPair placeholder_instances(const TreePair& pair, const ClusterSplit& split);

/// Divide and conquer over common clusters. Each side is solved twice, with the
/// placeholder free and with its pendant edge forced into the cut; the better
/// of "forced + forced - 1" and "free + free" is the distance.
SolveResult solve_with_clusters(const TreePair& pair, const SolverOptions& options);

}  // namespace tbrkit
