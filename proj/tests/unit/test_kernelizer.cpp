#include <doctest.h>

#include <map>

#include "tbrkit/chains.hpp"
#include "tbrkit/harness.hpp"
#include "tbrkit/kernelizer.hpp"
#include "tbrkit/newick.hpp"
#include "tbrkit/oracle.hpp"
#include "tbrkit/tbr.hpp"

using namespace tbrkit;

namespace {

TreePair caterpillar_pair(int n) {
  std::vector<std::string> a{"x"}, b{"y"};
  for (int i = 1; i <= n; ++i) {
    a.push_back(std::to_string(i));
    b.push_back(std::to_string(i));
  }
  a.push_back("y");
  b.push_back("x");
  return {caterpillar(a), caterpillar(b)};
}

}  // namespace

TEST_CASE("ruleset names") {
  for (Ruleset r : {Ruleset::None, Ruleset::SubtreeOnly, Ruleset::SubtreeChain, Ruleset::AllSeven})
    CHECK(parse_ruleset(to_string(r)) == r);
  CHECK(parse_ruleset("subtree-chain") == Ruleset::SubtreeChain);
  CHECK_THROWS(parse_ruleset("everything"));
}

TEST_CASE("chain reduction on the caterpillar pair") {
  auto r = apply_reduction(caterpillar_pair(6), 2);
  REQUIRE(r);
  CHECK(write_newick(r->first.first) == "(1,(2,(3,y)),x);");
  CHECK(write_newick(r->first.second) == "(1,(2,(3,x)),y);");
  CHECK(format_step(r->second) == "rule=2 removed=4,5,6 added=- delta=0");
  CHECK_FALSE(apply_reduction(caterpillar_pair(6), 1));

  for (int n : {4, 10}) {
    KernelResult k = kernelize(caterpillar_pair(n), Ruleset::SubtreeChain);
    CHECK(k.reduced.first.num_taxa() == 5);
    CHECK(k.parameter_reduction == 0);
  }
}

TEST_CASE("subtree reduction on identical trees") {
  TreePair same{caterpillar({"a", "b", "c", "d", "e", "f"}), caterpillar({"a", "b", "c", "d", "e", "f"})};
  TreePair cur = same;
  int steps = 0;
  while (auto r = apply_reduction(cur, 1)) {
    CHECK(r->second.added.size() == 1);
    CHECK(r->second.added[0].rfind("_s", 0) == 0);
    cur = r->first;
    ++steps;
  }
  CHECK(cur.first.num_taxa() == 2);
  CHECK(steps >= 1);

  KernelResult k = kernelize(same, Ruleset::AllSeven);
  CHECK(k.reduced.first.num_taxa() <= 3);
  CHECK(k.parameter_reduction == 0);
  CHECK(brute_force_tbr(k.reduced).distance == 0);
}

TEST_CASE("fresh labels avoid existing taxa") {
  TreePair p{parse_newick("((_s0,b),c,(d,e));"), parse_newick("((_s0,b),d,(c,e));")};
  auto r = apply_reduction(p, 1);
  REQUIRE(r);
  CHECK(r->second.removed == std::vector<std::string>{"_s0", "b"});
  CHECK(r->second.added == std::vector<std::string>{"_s1"});
}

TEST_CASE("rule 3 on a constructed instance") {
  TreePair p{caterpillar({"1", "2", "3", "a", "b", "c"}), caterpillar({"b", "a", "c", "1", "2", "3"})};
  CHECK_FALSE(apply_reduction(p, 1));
  CHECK_FALSE(apply_reduction(p, 2));
  auto r = apply_reduction(p, 3);
  REQUIRE(r);
  CHECK(r->second.parameter_delta == 1);
  CHECK(r->second.removed.size() == 3);
  CHECK(r->first.first.num_taxa() == 3);
  CHECK(brute_force_tbr(p).distance == brute_force_tbr(r->first).distance + 1);
}

TEST_CASE("rules 3 to 7 need rules 1 and 2 exhausted") {
  TreePair cat = caterpillar_pair(6);
  for (int rule = 3; rule <= 7; ++rule) CHECK_THROWS_AS(apply_reduction(cat, rule), std::logic_error);
  TreePair same{parse_newick("((a,b),(c,d),(e,f));"), parse_newick("((a,b),(c,d),(e,f));")};
  CHECK_THROWS_AS(apply_reduction(same, 4), std::logic_error);
  CHECK_THROWS_AS(apply_reduction(same, 8), std::invalid_argument);
}

TEST_CASE("none leaves the pair untouched") {
  TreePair cat = caterpillar_pair(5);
  KernelResult k = kernelize(cat, Ruleset::None);
  CHECK(k.trace.empty());
  CHECK(k.reduced.first == cat.first);
}

TEST_CASE("distance conservation against the oracle") {
  Rng rng(2718);
  for (int i = 0; i < 200; ++i) {
    int t = 4 + static_cast<int>(uniform_below(rng, 5));
    GeneratedPair g = generate_pair(t, static_cast<int>(uniform_below(rng, 101)),
                                    1 + static_cast<int>(uniform_below(rng, 4)), rng());
    const int d = brute_force_tbr(g.pair).distance;
    for (Ruleset rs : {Ruleset::SubtreeOnly, Ruleset::SubtreeChain, Ruleset::AllSeven}) {
      KernelResult k = kernelize(g.pair, rs);
      CHECK(brute_force_tbr(k.reduced).distance + k.parameter_reduction == d);
    }
  }
}

TEST_CASE("every rule fires and keeps its bookkeeping") {
  Rng rng(31);
  std::map<int, int> fired;
  for (int i = 0; i < 400; ++i) {
    int t = 6 + static_cast<int>(uniform_below(rng, 40));
    GeneratedPair g = generate_pair(t, static_cast<int>(uniform_below(rng, 101)),
                                    1 + static_cast<int>(uniform_below(rng, 8)), rng());
    KernelResult s = kernelize(g.pair, Ruleset::SubtreeOnly);
    KernelResult sc = kernelize(g.pair, Ruleset::SubtreeChain);
    KernelResult all = kernelize(g.pair, Ruleset::AllSeven);
    CHECK(all.reduced.first.num_taxa() <= sc.reduced.first.num_taxa());
    CHECK(sc.reduced.first.num_taxa() <= s.reduced.first.num_taxa());
    int sum = 0;
    for (std::size_t j = 0; j < all.trace.size(); ++j) {
      const ReductionStep& st = all.trace[j];
      ++fired[st.rule];
      sum += st.parameter_delta;
      CHECK(st.parameter_delta == (st.rule >= 3 && st.rule <= 5 ? 1 : 0));
      CHECK(st.added.size() == (st.rule == 1 ? 1u : 0u));
      // a removed cherry partner always leaves a common pendant pair behind
      if ((st.rule == 4 || st.rule == 5) && j + 1 < all.trace.size()) CHECK(all.trace[j + 1].rule == 1);
    }
    CHECK(sum == all.parameter_reduction);
    // fixed point
    if (all.reduced.first.num_taxa() >= 4)
      for (int rule = 1; rule <= 7; ++rule) CHECK_FALSE(apply_reduction(all.reduced, rule));
    if (sc.reduced.first.num_taxa() >= 4) {
      CHECK_FALSE(apply_reduction(sc.reduced, 1));
      CHECK_FALSE(apply_reduction(sc.reduced, 2));
      CHECK(find_common_chains(sc.reduced, 4).empty());
    }
  }
  for (int rule = 1; rule <= 7; ++rule) {
    CAPTURE(rule);
    CHECK(fired[rule] > 0);
  }
}

TEST_CASE("kernelization is deterministic") {
  GeneratedPair g = generate_pair(30, 50, 5, 77);
  KernelResult a = kernelize(g.pair, Ruleset::AllSeven);
  KernelResult b = kernelize(g.pair, Ruleset::AllSeven);
  CHECK(a.reduced.first == b.reduced.first);
  CHECK(a.reduced.second == b.reduced.second);
  REQUIRE(a.trace.size() == b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i) CHECK(format_step(a.trace[i]) == format_step(b.trace[i]));
}
