#pragma once

#include <iosfwd>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tbrkit/bounds.hpp"
#include "tbrkit/chains.hpp"
#include "tbrkit/kernelizer.hpp"
#include "tbrkit/model.hpp"
#include "tbrkit/tree_ops.hpp"

namespace tbrkit {

/// Partition of the taxa; blocks sorted, ordered by smallest taxon.
using Partition = std::vector<std::vector<Taxon>>;
/// The same by label, for results that outlive the pair they were built on.
using LabelForest = std::vector<std::vector<std::string>>;

/// Quartets displayed differently by the two trees, with the first tree's
/// topology, in lexicographic order of their taxa.
std::vector<Quartet> conflicting_quartets(const TreePair& pair);

struct PreservedChains {
  std::vector<ChainDescriptor> chains;
  std::vector<EdgeId> fixed;  // edges of the first tree, sorted
};

/// Greedy choice of taxa-disjoint common chains that some maximum agreement
/// forest keeps whole: every chain of three or more taxa, and 2-chains pendant
/// in either tree. Longest first, ties to the smaller first taxon. Remaining
/// candidates are trimmed to their longest segment disjoint from what was
/// already taken. The fixed edges are the pendant edges of the chosen taxa and
/// the edges between consecutive parents.
PreservedChains select_preserved_chains(const TreePair& pair);

/// Variables over the edges of pair.first, one row per conflicting quartet.
HittingSetModel build_model(const TreePair& pair, bool preserve_chains);

/// CPLEX LP text: binaries x0..x{m-1}, one cover row per constraint, fixed
/// variables as equalities.
std::string export_model(const HittingSetModel& model);

enum class SolveStatus { Optimal, UpperBoundOnly };
std::string_view to_string(SolveStatus s);

struct ExactOptions {
  const BoundCell* lower = nullptr;                 // external lower bound on the optimum
  std::optional<std::vector<EdgeId>> warm_start;   // feasible cut set; greedy if absent
  double time_cap_seconds = 0;                      // 0: none
  long node_limit = 0;                              // 0: none
  bool dominance = true;                            // column-dominance fixing
  std::ostream* log = nullptr;                      // one line per incumbent and at the end
};

struct ExactResult {
  int objective = 0;
  std::vector<EdgeId> cut_set;
  long nodes_explored = 0;
  int lower = 0;
  int upper = 0;
  SolveStatus status = SolveStatus::Optimal;
};

/// Depth-first branch and bound. Branches on the free variable in most open
/// rows (one before zero), with unit propagation and a disjoint-row packing
/// bound. Stops early once the incumbent meets the external lower bound.
/// Throws std::invalid_argument if a row has no variable left to cut.
ExactResult solve_exact(const HittingSetModel& model, const ExactOptions& options = {});

/// Components of the tree minus the cut edges, taxa-free ones dropped.
Partition extract_forest(const PhyloTree& tree, std::span<const EdgeId> cut_set);

struct ForestCheck {
  bool ok = true;
  std::string report;  // empty when ok
};

/// Checks both agreement-forest conditions. Throws std::invalid_argument if
/// `forest` is not a partition of the taxa.
ForestCheck validate_forest(const TreePair& pair, const Partition& forest);

/// Cut set of size |forest| - 1 in `tree` whose components are exactly the
/// blocks; requires the blocks' embeddings to be vertex-disjoint.
std::vector<EdgeId> cut_set_from_forest(const PhyloTree& tree, const Partition& forest);

Partition to_partition(const PhyloTree& tree, const LabelForest& forest);
LabelForest to_labels(const PhyloTree& tree, const Partition& forest);

struct SolverOptions {
  Ruleset ruleset = Ruleset::AllSeven;
  bool preserve_chains = true;
  bool use_clusters = false;
  long bound_samples = 10000;
  double bound_time_cap_seconds = 0;
  double time_cap_seconds = 60;
  long node_limit = 0;
  std::uint64_t seed = 1;
  int lower_hint = 0;             // known lower bound on the distance of the solved pair
  bool concurrent_bound = false;  // sample d_MP while the search runs
  bool dominance = true;
  std::ostream* log = nullptr;  // solver log, line oriented
};

struct SolveResult {
  int distance = 0;  // best known; exact when status is Optimal
  int lower = 0;
  int upper = 0;
  SolveStatus status = SolveStatus::Optimal;
  long nodes_explored = 0;
  int parameter_reduction = 0;
  int dmp_lower_bound = 0;
  TreePair instance;   // pair the forest and cut set refer to
  LabelForest forest;
  std::vector<EdgeId> cut_set;  // edges of instance.first
  int num_vars = 0;
  int num_fixed = 0;
  long num_constraints = 0;
};

/// Solves a pair without kernelizing it: model, d_MP bound, greedy warm start,
/// branch and bound.
SolveResult solve_reduced(const TreePair& pair, const SolverOptions& options);

/// Full pipeline: kernelize, optionally split on common clusters, solve, add
/// back the parameter reduction.
SolveResult tbr_distance(const TreePair& pair, const SolverOptions& options = {});

}  // namespace tbrkit
