#include "tbrkit/kernelizer.hpp"

#include <algorithm>
#include <stdexcept>

#include "tbrkit/chains.hpp"
#include "tbrkit/tree_ops.hpp"

namespace tbrkit {

std::string_view to_string(Ruleset r) {
  switch (r) {
    case Ruleset::None: return "none";
    case Ruleset::SubtreeOnly: return "subtree";
    case Ruleset::SubtreeChain: return "subtree-chain";
    case Ruleset::AllSeven: return "all";
  }
  return "?";
}

Ruleset parse_ruleset(std::string_view text) {
  if (text == "none") return Ruleset::None;
  if (text == "subtree") return Ruleset::SubtreeOnly;
  if (text == "subtree-chain") return Ruleset::SubtreeChain;
  if (text == "all") return Ruleset::AllSeven;
  throw std::invalid_argument("unknown ruleset '" + std::string(text) + "'");
}

namespace {

struct Match {
  std::vector<Taxon> key;  // involved taxa, sorted
  std::vector<Taxon> seq;  // involved taxa in rule order
  std::vector<Taxon> removed;
};

// Keeps the first match in (key, seq) order.
struct Best {
  std::optional<Match> m;
  void offer(std::vector<Taxon> seq, std::vector<Taxon> removed) {
    Match c{seq, std::move(seq), std::move(removed)};
    std::sort(c.key.begin(), c.key.end());
    if (!m || std::tie(c.key, c.seq) < std::tie(m->key, m->seq)) m = std::move(c);
  }
};

bool distinct(std::vector<Taxon> v) {
  std::sort(v.begin(), v.end());
  return std::adjacent_find(v.begin(), v.end()) == v.end();
}

std::optional<Taxon> partner(const PhyloTree& t, Taxon x) { return t.cherry_partner(x); }

// Cherries of a tree as ordered pairs, both orientations.
std::vector<std::pair<Taxon, Taxon>> ordered_cherries(const PhyloTree& t) {
  std::vector<std::pair<Taxon, Taxon>> out;
  for (Taxon x = 0; x < static_cast<Taxon>(t.num_taxa()); ++x)
    if (auto y = partner(t, x)) out.push_back({x, *y});
  return out;
}

std::optional<Match> match_rule3(const TreePair& p) {
  Best best;
  for (auto [l1, l2] : ordered_cherries(p.first)) {
    auto l3 = partner(p.second, l2);
    if (!l3 || *l3 == l1) continue;
    std::vector<Taxon> c{l1, l2, *l3};
    if (is_common_chain(p, c)) best.offer(c, c);
  }
  return best.m;
}

std::optional<Match> match_rule4(const TreePair& p) {
  Best best;
  const Taxon n = static_cast<Taxon>(p.first.num_taxa());
  for (auto [l2, l3] : ordered_cherries(p.first)) {
    auto x = partner(p.second, l3);
    if (!x || *x == l2) continue;
    for (Taxon l1 = 0; l1 < n; ++l1) {
      if (l1 == l2 || l1 == l3 || l1 == *x) continue;
      std::vector<Taxon> c{l1, l2, l3};
      if (is_common_chain(p, c)) best.offer({l1, l2, l3, *x}, {*x});
    }
  }
  return best.m;
}

std::optional<Match> match_rule5(const TreePair& p) {
  Best best;
  for (Taxon x = 0; x < static_cast<Taxon>(p.first.num_taxa()); ++x) {
    auto l2 = partner(p.first, x);
    auto l4 = partner(p.second, x);
    if (!l2 || !l4) continue;
    auto l1 = partner(p.second, *l2);
    auto l3 = partner(p.first, *l4);
    if (!l1 || !l3) continue;
    if (!distinct({*l1, *l2, *l3, *l4, x})) continue;
    std::vector<Taxon> c1{*l1, *l2}, c2{*l3, *l4};
    if (is_common_chain(p, c1) && is_common_chain(p, c2)) best.offer({*l1, *l2, *l3, *l4, x}, {x});
  }
  return best.m;
}

std::optional<Match> match_rule6(const TreePair& p) {
  Best best;
  for (const auto& c : enumerate_chains(p.second, 6)) {
    if (!p.first.is_cherry(c[1], c[2]) || !p.first.is_cherry(c[3], c[4])) continue;
    std::vector<Taxon> c1{c[0], c[1], c[2]}, c2{c[3], c[4], c[5]};
    if (is_common_chain(p, c1) && is_common_chain(p, c2)) best.offer(c, {c[3], c[4]});
  }
  return best.m;
}

std::optional<Match> match_rule7(const TreePair& p) {
  Best best;
  for (const auto& c : enumerate_chains(p.second, 5)) {
    if (!p.first.is_cherry(c[1], c[2]) || !p.first.is_cherry(c[3], c[4])) continue;
    std::vector<Taxon> c1{c[0], c[1], c[2]}, c2{c[3], c[4]};
    if (is_common_chain(p, c1) && is_common_chain(p, c2)) best.offer(c, {c[3]});
  }
  return best.m;
}

std::vector<std::string> labels_of(const PhyloTree& t, const std::vector<Taxon>& xs) {
  std::vector<std::string> out;
  for (Taxon x : xs) out.push_back(t.label(x));
  return out;
}

TreePair remove_taxa(const TreePair& p, const std::vector<Taxon>& removed) {
  std::vector<char> gone(p.first.num_taxa(), 0);
  for (Taxon x : removed) gone[x] = 1;
  std::vector<Taxon> keep;
  for (Taxon x = 0; x < static_cast<Taxon>(p.first.num_taxa()); ++x)
    if (!gone[x]) keep.push_back(x);
  return {restrict_taxa(p.first, keep), restrict_taxa(p.second, keep)};
}

std::string fresh_label(const PhyloTree& t, int& counter) {
  while (true) {
    std::string l = "_s" + std::to_string(counter++);
    if (!t.find_taxon(l)) return l;
  }
}

std::optional<std::pair<TreePair, ReductionStep>> rule1(const TreePair& p, int& counter) {
  if (p.first.num_taxa() < 3) return std::nullopt;
  auto subtrees = find_common_pendant_subtrees(p);
  if (subtrees.empty()) return std::nullopt;
  const auto& s = subtrees.front();
  std::vector<char> in_s(p.first.num_taxa(), 0);
  for (Taxon x : s) in_s[x] = 1;
  std::vector<Taxon> keep;
  for (Taxon x = 0; x < static_cast<Taxon>(p.first.num_taxa()); ++x)
    if (!in_s[x] || x == s.front()) keep.push_back(x);
  std::string label = fresh_label(p.first, counter);
  const std::string& old = p.first.label(s.front());
  PhyloTree a = restrict_taxa(p.first, keep);
  PhyloTree b = restrict_taxa(p.second, keep);
  a = relabel(a, a.taxon(old), label);
  b = relabel(b, b.taxon(old), label);
  ReductionStep step{1, labels_of(p.first, s), {label}, 0};
  return std::pair{TreePair{std::move(a), std::move(b)}, std::move(step)};
}

std::optional<std::pair<TreePair, ReductionStep>> rule2(const TreePair& p) {
  if (p.first.num_taxa() < 4) return std::nullopt;
  auto chains = find_common_chains(p, 4);
  if (chains.empty()) return std::nullopt;
  const auto& c = chains.front().taxa;
  std::vector<Taxon> removed(c.begin() + 3, c.end());
  ReductionStep step{2, labels_of(p.first, removed), {}, 0};
  return std::pair{remove_taxa(p, removed), std::move(step)};
}

std::optional<std::pair<TreePair, ReductionStep>> rules3to7(const TreePair& p, int rule) {
  if (p.first.num_taxa() < 4) return std::nullopt;
  std::optional<Match> m;
  switch (rule) {
    case 3: m = match_rule3(p); break;
    case 4: m = match_rule4(p); break;
    case 5: m = match_rule5(p); break;
    case 6: m = match_rule6(p); break;
    case 7: m = match_rule7(p); break;
    default: throw std::invalid_argument("rule id must lie in 1..7");
  }
  if (!m) return std::nullopt;
  ReductionStep step{rule, labels_of(p.first, m->removed), {}, rule <= 5 ? 1 : 0};
  return std::pair{remove_taxa(p, m->removed), std::move(step)};
}

}  // namespace

std::optional<std::pair<TreePair, ReductionStep>> apply_reduction(const TreePair& pair, int rule) {
  require_same_taxa(pair);
  int counter = 0;
  if (rule == 1) return rule1(pair, counter);
  if (rule == 2) return rule2(pair);
  if (rule < 3 || rule > 7) throw std::invalid_argument("rule id must lie in 1..7");
  if (rule1(pair, counter) || rule2(pair))
    throw std::logic_error("rules 3-7 require rules 1 and 2 to be exhausted");
  return rules3to7(pair, rule);
}

KernelResult kernelize(const TreePair& pair, Ruleset ruleset) {
  require_same_taxa(pair);
  KernelResult res{pair, {}, 0, ruleset};
  int counter = 0;
  auto take = [&](std::optional<std::pair<TreePair, ReductionStep>>& r) {
    res.reduced = std::move(r->first);
    res.parameter_reduction += r->second.parameter_delta;
    res.trace.push_back(std::move(r->second));
  };
  while (ruleset != Ruleset::None && res.reduced.first.num_taxa() >= 4) {
    if (auto r = rule1(res.reduced, counter)) {
      take(r);
      continue;
    }
    if (ruleset == Ruleset::SubtreeOnly) break;
    if (auto r = rule2(res.reduced)) {
      take(r);
      continue;
    }
    if (ruleset == Ruleset::SubtreeChain) break;
    bool applied = false;
    for (int rule = 3; rule <= 7 && !applied; ++rule) {
      if (auto r = rules3to7(res.reduced, rule)) {
        take(r);
        applied = true;
      }
    }
    if (!applied) break;
  }
  return res;
}

std::string format_step(const ReductionStep& step) {
  auto join = [](const std::vector<std::string>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
    return s.empty() ? std::string("-") : s;
  };
  return "rule=" + std::to_string(step.rule) + " removed=" + join(step.removed) +
         " added=" + join(step.added) + " delta=" + std::to_string(step.parameter_delta);
}

}  // namespace tbrkit
