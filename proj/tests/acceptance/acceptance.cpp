// End-to-end acceptance run. Prints one [PASS]/[FAIL] line per criterion and
// exits nonzero if any fails.

#include <boost/math/distributions/chi_squared.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "test_support.hpp"
#include "tbrkit/bounds.hpp"
#include "tbrkit/chains.hpp"
#include "tbrkit/cluster.hpp"
#include "tbrkit/harness.hpp"
#include "tbrkit/kernelizer.hpp"
#include "tbrkit/maf_solver.hpp"
#include "tbrkit/newick.hpp"
#include "tbrkit/oracle.hpp"
#include "tbrkit/tbr.hpp"

using namespace tbrkit;
using Clock = std::chrono::steady_clock;

namespace {

constexpr std::uint64_t kRoot = 20240611;

int failures = 0;

void report(int id, const char* name, bool ok, const std::string& detail) {
  std::printf("[%s] %d %s: %s\n", ok ? "PASS" : "FAIL", id, name, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

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

struct Instance {
  GeneratedPair gen;
  int oracle = -1;  // -1 when not known
  int exact = -1;
};

// Criterion 3 instances: t in 5..8, k in 1..4, any skew.
std::vector<Instance> small_instances() {
  std::vector<Instance> out;
  for (int i = 0; i < 200; ++i) {
    Rng rng(derive_seed(kRoot, {3, static_cast<std::uint64_t>(i)}));
    int t = 5 + static_cast<int>(uniform_below(rng, 4));
    int k = 1 + static_cast<int>(uniform_below(rng, 4));
    int s = static_cast<int>(uniform_below(rng, 101));
    out.push_back({generate_pair(t, s, k, rng()), -1, -1});
  }
  return out;
}

std::vector<Instance> medium_instances() {
  std::vector<Instance> out;
  for (int i = 0; i < 500; ++i) {
    Rng rng(derive_seed(kRoot, {4, static_cast<std::uint64_t>(i)}));
    int t = 8 + static_cast<int>(uniform_below(rng, 23));
    int k = 1 + static_cast<int>(uniform_below(rng, 6));
    int s = static_cast<int>(uniform_below(rng, 101));
    out.push_back({generate_pair(t, s, k, rng()), -1, -1});
  }
  return out;
}

struct BoundTally {
  int solved = 0, equal = 0, violations = 0, max_gap = 0;
  void add(int bound, int exact) {
    ++solved;
    if (bound == exact) ++equal;
    if (bound > exact) ++violations;
    max_gap = std::max(max_gap, exact - bound);
  }
};

struct SavingTally {
  int qualifying = 0, empty = 0;
  double share = 0;
  void add(const TreePair& reduced) {
    if (reduced.first.num_taxa() < 4 || select_preserved_chains(reduced).chains.empty()) return;
    HittingSetModel m = build_model(reduced, true);
    ++qualifying;
    if (m.num_fixed_zero() == 0) ++empty;
    share += static_cast<double>(m.num_fixed_zero()) / m.num_vars;
  }
};

void criterion1() {
  bool ok = true;
  double slowest = 0;
  std::string bad;
  for (int n = 3; n <= 12; ++n) {
    auto start = Clock::now();
    SolveResult r = tbr_distance(caterpillar_pair(n));
    double sec = seconds_since(start);
    slowest = std::max(slowest, sec);
    if (r.distance != 2 || r.status != SolveStatus::Optimal || sec >= 1.0) {
      ok = false;
      bad += " n=" + std::to_string(n) + ":d=" + std::to_string(r.distance);
    }
  }
  report(1, "caterpillar exactness", ok, "n=3..12 all d=2, slowest " + fmt("%.3f", slowest) + " s" + bad);
}

void criterion2() {
  bool ok = true;
  std::string bad;
  for (int n = 4; n <= 12; ++n) {
    KernelResult r = kernelize(caterpillar_pair(n), Ruleset::SubtreeChain);
    if (r.reduced.first.num_taxa() != 5 || r.reduced.second.num_taxa() != 5 || r.parameter_reduction != 0) {
      ok = false;
      bad += " n=" + std::to_string(n) + ":" + std::to_string(r.reduced.first.num_taxa());
    }
  }
  report(2, "chain-reduction collapse", ok, "n=4..12 reduce to 5 taxa, no parameter reduction" + bad);
}

// Criteria 3, 5, 9 and 10 share the small instances.
void criteria_small(std::vector<Instance>& inst, BoundTally& bounds, SavingTally& savings, int& preserve_changed) {
  auto start = Clock::now();
  int mismatches = 0, accounting = 0, not_optimal = 0;
  for (std::size_t i = 0; i < inst.size(); ++i) {
    const TreePair& pair = inst[i].gen.pair;
    inst[i].oracle = brute_force_tbr(pair).distance;
    std::map<bool, std::set<int>> by_preserve;
    for (Ruleset rs : {Ruleset::AllSeven, Ruleset::None})
      for (bool preserve : {true, false})
        for (bool clusters : {true, false}) {
          SolverOptions o;
          o.ruleset = rs;
          o.preserve_chains = preserve;
          o.use_clusters = clusters;
          o.seed = derive_seed(kRoot, {30, i});
          SolveResult r = tbr_distance(pair, o);
          if (r.status != SolveStatus::Optimal) ++not_optimal;
          if (r.distance != inst[i].oracle) ++mismatches;
          by_preserve[preserve].insert(r.distance);
          bounds.add(r.dmp_lower_bound, inst[i].oracle);
        }
    if (by_preserve[true] != by_preserve[false]) ++preserve_changed;

    KernelResult k = kernelize(pair, Ruleset::AllSeven);
    SolverOptions o;
    o.seed = derive_seed(kRoot, {31, i});
    int solver = solve_reduced(k.reduced, o).distance + k.parameter_reduction;
    int oracle_reduced = brute_force_tbr(k.reduced).distance + k.parameter_reduction;
    if (solver != inst[i].oracle || oracle_reduced != inst[i].oracle) ++accounting;
    savings.add(k.reduced);

    Rng rng(derive_seed(kRoot, {32, i}));
    bounds.add(dmp_lower_bound(pair, {}, rng).value, inst[i].oracle);
  }
  double sec = seconds_since(start);
  report(3, "oracle equivalence", mismatches == 0 && not_optimal == 0 && sec < 300,
         std::to_string(inst.size()) + " pairs x 8 settings, " + std::to_string(mismatches) + " mismatches, " +
             std::to_string(not_optimal) + " not optimal, " + fmt("%.1f", sec) + " s (limit 300)");
  report(5, "distance accounting", accounting == 0,
         std::to_string(accounting) + " of " + std::to_string(inst.size()) +
             " pairs where oracle(original) != solver(reduced) + parameter_reduction");
}

void criterion4(std::vector<Instance>& inst, BoundTally& bounds, SavingTally& savings) {
  auto start = Clock::now();
  int checked_all = 0, checked_sc = 0, viol_all = 0, viol_sc = 0, unsolved = 0, inconsistent = 0;
  for (std::size_t i = 0; i < inst.size(); ++i) {
    const TreePair& pair = inst[i].gen.pair;
    KernelResult sc = kernelize(pair, Ruleset::SubtreeChain);
    KernelResult all = kernelize(pair, Ruleset::AllSeven);
    SolverOptions o;
    o.time_cap_seconds = 0;
    o.seed = derive_seed(kRoot, {40, i});
    SolveResult red = solve_reduced(all.reduced, o);
    SolveResult full = tbr_distance(pair, o);
    if (red.status != SolveStatus::Optimal || full.status != SolveStatus::Optimal) {
      ++unsolved;
      continue;
    }
    if (red.distance + all.parameter_reduction != full.distance) ++inconsistent;
    inst[i].exact = full.distance;
    const int d_all = red.distance;
    const int d_sc = full.distance;  // rules 1 and 2 keep the distance
    const int n_all = static_cast<int>(all.reduced.first.num_taxa());
    const int n_sc = static_cast<int>(sc.reduced.first.num_taxa());
    if (d_all >= 2) {
      ++checked_all;
      if (n_all > 11 * d_all - 9) ++viol_all;
    }
    if (d_sc >= 2) {
      ++checked_sc;
      if (n_sc > 15 * d_sc - 9) ++viol_sc;
    }
    bounds.add(full.dmp_lower_bound, full.distance);
    KernelResult sub = kernelize(pair, Ruleset::SubtreeOnly);
    Rng rng(derive_seed(kRoot, {41, i}));
    bounds.add(dmp_lower_bound(sub.reduced, {}, rng).value, full.distance);
    savings.add(all.reduced);
  }
  report(4, "kernel bounds", viol_all == 0 && viol_sc == 0 && unsolved == 0 && inconsistent == 0,
         "11d-9: " + std::to_string(viol_all) + " violations in " + std::to_string(checked_all) +
             ", 15d-9: " + std::to_string(viol_sc) + " violations in " + std::to_string(checked_sc) + ", " +
             std::to_string(unsolved) + " unsolved, " + std::to_string(inconsistent) + " inconsistent, " +
             fmt("%.1f", seconds_since(start)) + " s");
}

void criterion6() {
  int cut_sets = 0, invalid = 0, too_many = 0, reconstruct_bad = 0;
  for (int i = 0; i < 50; ++i) {
    Rng rng(derive_seed(kRoot, {6, static_cast<std::uint64_t>(i)}));
    int t = 6 + static_cast<int>(uniform_below(rng, 5));
    int k = 1 + static_cast<int>(uniform_below(rng, 4));
    GeneratedPair g = generate_pair(t, 50, k, rng());
    HittingSetModel model = build_model(g.pair, false);
    const int m = model.num_vars;
    for (int j = 0; j < 20; ++j) {
      double q = 0.5 * uniform_unit(rng);
      std::vector<char> in(m, 0);
      for (int v = 0; v < m; ++v) in[v] = uniform_unit(rng) < q;
      // Repair: hit each open row with one of its variables at random.
      for (std::size_t r = 0; r < model.num_constraints(); ++r) {
        std::vector<int> vars;
        bool hit = false;
        for (int v = 0; v < m; ++v)
          if (model.row_has(r, v)) {
            vars.push_back(v);
            hit |= in[v] != 0;
          }
        if (!hit) in[vars[uniform_below(rng, vars.size())]] = 1;
      }
      std::vector<EdgeId> cut;
      for (int v = 0; v < m; ++v)
        if (in[v]) cut.push_back(v);
      Partition f = extract_forest(g.pair.first, cut);
      ++cut_sets;
      if (!validate_forest(g.pair, f).ok) ++invalid;
      if (f.size() > cut.size() + 1) ++too_many;
    }
    OracleResult best = brute_force_tbr(g.pair);
    std::vector<EdgeId> cut = cut_set_from_forest(g.pair.first, best.forest);
    if (cut.size() + 1 != best.forest.size() || extract_forest(g.pair.first, cut) != best.forest) ++reconstruct_bad;
  }
  report(6, "cut set round trip", invalid == 0 && too_many == 0 && reconstruct_bad == 0 && cut_sets == 1000,
         std::to_string(cut_sets) + " cut sets: " + std::to_string(invalid) + " invalid forests, " +
             std::to_string(too_many) + " with |F| > |cut| + 1; " + std::to_string(reconstruct_bad) +
             " of 50 optimal forests not rebuilt from |F| - 1 cuts");
}

void criterion7() {
  bool ok = true;
  std::string detail;
  {
    PhyloTree quartet = parse_newick("((a,b),(c,d));");
    ConvexCharacterSampler s(quartet, 2);
    Rng rng(derive_seed(kRoot, {7}));
    std::map<std::string, int> freq;
    for (int i = 0; i < 10000; ++i) ++freq[s.sample(rng).to_string(quartet)];
    double f_one = freq["a,b,c,d"] / 10000.0, f_two = freq["a,b|c,d"] / 10000.0;
    ok = freq.size() == 2 && s.count() == 2 && std::abs(f_one - 0.5) <= 0.05 && std::abs(f_two - 0.5) <= 0.05;
    detail = "4 leaves: " + fmt("%.4f", f_one) + " / " + fmt("%.4f", f_two);
  }
  std::vector<std::string> fixtures{"((a,b),(c,d));",
                                    "((a,b),c,(d,e));",
                                    "((a,c),b,(d,e));",
                                    "(((a,b),c),d,(e,f));",
                                    "((a,b),(c,d),(e,f));",
                                    "((a,e),(c,f),(b,d));",
                                    "(((a,f),d),e,(b,c));"};
  double min_p = 1;
  for (std::size_t i = 0; i < fixtures.size(); ++i) {
    PhyloTree tree = parse_newick(fixtures[i]);
    auto expected = testing::convex_characters(tree, 2);
    ConvexCharacterSampler s(tree, 2);
    if (s.count() != expected.size()) {
      ok = false;
      detail += ", count mismatch on " + fixtures[i];
      continue;
    }
    std::map<std::vector<int>, long> freq;
    for (const auto& c : expected) freq[c] = 0;
    const long samples = 20000;
    Rng rng(derive_seed(kRoot, {7, i}));
    for (long j = 0; j < samples; ++j) {
      auto it = freq.find(s.sample(rng).state);
      if (it == freq.end()) {
        ok = false;
        detail += ", ineligible draw on " + fixtures[i];
        break;
      }
      ++it->second;
    }
    if (expected.size() < 2) continue;
    const double e = static_cast<double>(samples) / expected.size();
    double chi = 0;
    for (const auto& [c, o] : freq) chi += (o - e) * (o - e) / e;
    boost::math::chi_squared dist(static_cast<double>(expected.size() - 1));
    double p = boost::math::cdf(boost::math::complement(dist, chi));
    min_p = std::min(min_p, p);
    if (p <= 0.001) ok = false;
  }
  report(7, "sampler uniformity", ok, detail + "; min chi-square p over " + std::to_string(fixtures.size()) +
                                          " fixtures " + fmt("%.4f", min_p));
}

void criterion8() {
  long checked = 0, wrong = 0;
  for (int n = 3; n <= 6; ++n) {
    for (const PhyloTree& tree : testing::all_trees(testing::letters(n))) {
      std::vector<int> raw(n, 0);
      while (true) {
        Character f = Character::from_states(raw);
        ++checked;
        if (fitch_score(tree, f) != testing::brute_parsimony(tree, f.state, f.num_states)) ++wrong;
        int i = 0;
        while (i < n && raw[i] == 2) raw[i++] = 0;
        if (i == n) break;
        ++raw[i];
      }
    }
  }
  report(8, "Fitch correctness", wrong == 0 && checked > 0,
         std::to_string(checked) + " tree/character pairs, " + std::to_string(wrong) + " mismatches");
}

void criterion11() {
  ExperimentConfig cfg;
  std::string runs[2];
  double secs[2];
  std::vector<StatRow> rows;
  for (int r = 0; r < 2; ++r) {
    std::ostringstream csv;
    auto start = Clock::now();
    rows = run_experiment(cfg, &csv);
    secs[r] = seconds_since(start);
    runs[r] = csv.str();
  }
  std::ofstream("acceptance_experiment.csv") << runs[0];
  const std::string header = runs[0].substr(0, runs[0].find('\n'));
  bool columns = true;
  for (const char* c : {"s_taxa", "sc_taxa", "scn_taxa", "param_reductions", "dmp_lb", "d_tbr_exact", "f_k"})
    columns &= header.find(c) != std::string::npos;
  int exact = 0, large = 0, over = 0;
  for (const StatRow& r : rows) {
    if (!r.d_tbr_exact) continue;
    ++exact;
    if (*r.d_tbr_exact >= 2) {
      ++large;
      if (!r.f_k || *r.f_k > 11) ++over;
    }
  }
  bool ok = columns && runs[0] == runs[1] && rows.size() == 54 && secs[0] < 600 && secs[1] < 600 && over == 0;
  Summary sum = compute_stats(rows);
  report(11, "experiment pipeline", ok,
         std::to_string(rows.size()) + " rows in " + fmt("%.1f", secs[0]) + " s (rerun " + fmt("%.1f", secs[1]) +
             " s), " + (runs[0] == runs[1] ? "identical" : "DIFFERENT") + " on rerun, " + std::to_string(exact) +
             " exact, f_k > 11 on " + std::to_string(over) + " of " + std::to_string(large) + " rows with d >= 2" +
             (sum.max_f_k ? ", max f_k " + fmt("%.3f", *sum.max_f_k) : std::string()));
}

}  // namespace

int main() {
  auto start = Clock::now();
  criterion1();
  criterion2();
  auto small = small_instances();
  BoundTally bounds;
  SavingTally savings;
  int preserve_changed = 0;
  criteria_small(small, bounds, savings, preserve_changed);
  auto medium = medium_instances();
  criterion4(medium, bounds, savings);
  criterion6();
  criterion7();
  criterion8();
  report(9, "d_MP soundness", bounds.violations == 0,
         std::to_string(bounds.violations) + " violations in " + std::to_string(bounds.solved) + " bound/exact pairs; " +
             fmt("%.1f", 100.0 * bounds.equal / std::max(1, bounds.solved)) + "% equal, max gap " +
             std::to_string(bounds.max_gap));
  report(10, "chain preservation", preserve_changed == 0 && savings.qualifying > 0 && savings.empty == 0,
         "optimum changed by preservation on " + std::to_string(preserve_changed) + " pairs; " +
             std::to_string(savings.qualifying) + " reduced instances with a qualifying chain, " +
             std::to_string(savings.empty) + " without fixed-zero variables, mean saving " +
             fmt("%.2f", 100.0 * savings.share / std::max(1, savings.qualifying)) + "% of variables");
  criterion11();
  std::printf("%d failed, %.1f s\n", failures, seconds_since(start));
  return failures == 0 ? 0 : 1;
}
