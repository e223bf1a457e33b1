#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tbrkit/phylo_tree.hpp"

namespace tbrkit {

/// Which reductions kernelize may use. None leaves the pair untouched.
enum class Ruleset { None, SubtreeOnly, SubtreeChain, AllSeven };

std::string_view to_string(Ruleset r);
/// Accepts none, subtree, subtree-chain, all.
Ruleset parse_ruleset(std::string_view text);

struct ReductionStep {
  int rule = 0;
  std::vector<std::string> removed;  // labels, in the order the rule names them
  std::vector<std::string> added;    // fresh labels (rule 1 only)
  int parameter_delta = 0;           // 1 for rules 3, 4 and 5
};

struct KernelResult {
  TreePair reduced;
  std::vector<ReductionStep> trace;
  int parameter_reduction = 0;
  Ruleset ruleset = Ruleset::AllSeven;
};

/// One application of `rule` at its first match, or nullopt. Matches are
/// ordered by their sorted involved taxa, then by taxa sequence. Rules 3 to 7
/// throw std::logic_error while rule 1 or 2 still applies.
std::optional<std::pair<TreePair, ReductionStep>> apply_reduction(const TreePair& pair, int rule);

/// Runs the ruleset to a fixed point: rule 1, then rule 2, back to rule 1 after
/// any change; rules 3 to 7 in order only once 1 and 2 are exhausted, again
/// restarting at rule 1. Stops early once fewer than four taxa remain.
KernelResult kernelize(const TreePair& pair, Ruleset ruleset);

std::string format_step(const ReductionStep& step);

}  // namespace tbrkit
