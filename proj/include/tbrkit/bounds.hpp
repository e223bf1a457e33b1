#pragma once

#include <atomic>
#include <boost/multiprecision/cpp_int.hpp>
#include <optional>
#include <string>
#include <vector>

#include "tbrkit/model.hpp"
#include "tbrkit/phylo_tree.hpp"
#include "tbrkit/tbr.hpp"

namespace tbrkit {

using BigCount = boost::multiprecision::cpp_int;

/// States per taxon (indexed like the tree's taxa), numbered 0..num_states-1.
struct Character {
  std::vector<int> state;
  int num_states = 0;
  int min_state_size = 0;  // smallest number of taxa sharing a state

  /// Builds from raw states, renumbering by first appearance.
  static Character from_states(std::vector<int> raw);
  std::string to_string(const PhyloTree& tree) const;  // "a,b|c,d,e"
};

/// Minimum number of bichromatic edges over all extensions to internal
/// vertices (Fitch).
int fitch_score(const PhyloTree& tree, const Character& f);

/// Uniform sampler over characters that are convex on `tree` and use every
/// state on at least p taxa. Counts are exact, so the draw is exactly uniform.
class ConvexCharacterSampler {
 public:
  ConvexCharacterSampler(const PhyloTree& tree, int p = 2);

  /// Number of eligible characters.
  const BigCount& count() const { return total_; }
  Character sample(Rng& rng) const;

 private:
  struct Node {
    Vertex v;
    int child[2] = {-1, -1};  // node indices, -1 for a leaf
    Taxon taxon = -1;
    BigCount closed;
    std::vector<BigCount> open;  // open[j], j = 1..p, p meaning "at least p"
  };
  void fill(Node& node) const;
  void sample_node(int idx, int state, int block, Rng& rng, std::vector<int>& out, int& next) const;

  int n_;
  int p_;
  std::vector<Node> nodes_;
  int top_ = -1;  // node below leaf 0
  BigCount total_;
};

/// Monotone shared lower bound: writers only raise it, readers may see a
/// stale value.
class BoundCell {
 public:
  explicit BoundCell(int v = 0) : value_(v) {}
  int get() const { return value_.load(std::memory_order_acquire); }
  /// Returns true if the stored value increased.
  bool raise(int v);

 private:
  std::atomic<int> value_;
};

struct BoundBudget {
  long samples = 10000;
  double time_cap_seconds = 0;  // 0: no cap
  const std::atomic<bool>* stop = nullptr;  // checked between samples
};

struct BoundReport {
  int value = 0;
  long samples_taken = 0;
  double seconds = 0;
  std::optional<Character> best_character;
  int best_source = -1;  // 0 or 1: tree the best character was drawn for
};

/// max |l_f(T) - l_f(T')| over sampled eligible characters (p = 2), each drawn
/// for a tree chosen uniformly. Optionally publishes progress to `cell`.
BoundReport dmp_lower_bound(const TreePair& pair, const BoundBudget& budget, Rng& rng,
                            BoundCell* cell = nullptr);

struct GreedyResult {
  std::vector<EdgeId> cut_set;
  int value = 0;
};

/// Classical greedy cover: repeatedly fixes the free variable hitting the most
/// unsatisfied constraints, ties to the lowest edge index. Variables fixed to
/// one start in the solution.
GreedyResult greedy_upper_bound(const HittingSetModel& model);

}  // namespace tbrkit
