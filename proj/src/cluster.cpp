#include "tbrkit/cluster.hpp"

#include <algorithm>
#include <map>

namespace tbrkit {

namespace {

using Bits = std::vector<std::uint64_t>;

// Taxa below each edge when rooted at leaf 0, keyed by edge id.
std::vector<Bits> edge_splits(const PhyloTree& t) {
  const int n = static_cast<int>(t.num_taxa());
  const int nv = static_cast<int>(t.num_vertices());
  const int w = (n + 63) / 64;
  std::vector<Bits> below(nv, Bits(w, 0));
  for (Taxon x = 0; x < n; ++x) below[x][x / 64] |= std::uint64_t{1} << (x % 64);
  for (Vertex v = nv - 1; v >= n; --v) {
    auto nb = t.neighbors(v);
    for (int k = 0; k < w; ++k) below[v][k] = below[nb[1]][k] | below[nb[2]][k];
  }
  std::vector<Bits> out(t.num_edges());
  for (EdgeId e = 0; e < static_cast<EdgeId>(t.num_edges()); ++e) out[e] = below[t.edge(e).v];
  return out;
}

std::vector<Taxon> members(const Bits& b, int n, bool inside) {
  std::vector<Taxon> out;
  for (Taxon x = 0; x < n; ++x)
    if ((((b[x / 64] >> (x % 64)) & 1) != 0) == inside) out.push_back(x);
  return out;
}

std::string unused_label(const PhyloTree& t, const std::string& base) {
  if (!t.find_taxon(base)) return base;
  for (int i = 1;; ++i) {
    std::string l = base + "_" + std::to_string(i);
    if (!t.find_taxon(l)) return l;
  }
}

// Restriction to `side` plus one taxon `stand_in` from the other side,
// relabelled to `label`.
TreePair with_placeholder(const TreePair& pair, std::vector<Taxon> side, Taxon stand_in, const std::string& label) {
  side.push_back(stand_in);
  std::sort(side.begin(), side.end());
  const std::string& old = pair.first.label(stand_in);
  PhyloTree a = restrict_taxa(pair.first, side);
  PhyloTree b = restrict_taxa(pair.second, side);
  a = relabel(a, a.taxon(old), label);
  b = relabel(b, b.taxon(old), label);
  return {std::move(a), std::move(b)};
}

struct Part {
  int objective_lower;
  int objective_upper;
  LabelForest forest;
  long nodes;
  bool optimal;
};

Part forced_solve(const TreePair& inst, const std::string& rho, const SolveResult& free,
                  const SolverOptions& options) {
  HittingSetModel model = build_model(inst, false);
  const EdgeId pendant = inst.first.pendant_edge(inst.first.taxon(rho));
  model.fixed_one[pendant] = 1;
  // Forcing one more edge costs at most one extra cut.
  std::vector<EdgeId> warm = free.cut_set;
  if (std::find(warm.begin(), warm.end(), pendant) == warm.end()) warm.push_back(pendant);
  BoundCell lower(free.lower);
  ExactOptions eo;
  eo.lower = &lower;
  eo.warm_start = warm;
  eo.time_cap_seconds = options.time_cap_seconds;
  eo.node_limit = options.node_limit;
  eo.dominance = options.dominance;
  ExactResult r = solve_exact(model, eo);
  return {std::max(r.lower, free.lower), r.upper, to_labels(inst.first, extract_forest(inst.first, r.cut_set)),
          r.nodes_explored, r.status == SolveStatus::Optimal};
}

void drop_label(LabelForest& f, const std::string& label, std::vector<std::string>* removed_block) {
  for (auto it = f.begin(); it != f.end(); ++it) {
    auto pos = std::find(it->begin(), it->end(), label);
    if (pos == it->end()) continue;
    it->erase(pos);
    if (removed_block) *removed_block = *it;
    f.erase(it);
    return;
  }
}

}  // namespace

std::optional<ClusterSplit> find_common_cluster(const TreePair& pair) {
  require_same_taxa(pair);
  const int n = static_cast<int>(pair.first.num_taxa());
  if (n < 4) return std::nullopt;
  auto sa = edge_splits(pair.first);
  auto sb = edge_splits(pair.second);
  std::map<Bits, EdgeId> in_b;
  for (EdgeId e = 0; e < static_cast<EdgeId>(sb.size()); ++e) in_b.emplace(sb[e], e);
  std::optional<ClusterSplit> best;
  for (EdgeId e = 0; e < static_cast<EdgeId>(sa.size()); ++e) {
    auto it = in_b.find(sa[e]);
    if (it == in_b.end()) continue;
    auto in = members(sa[e], n, true);
    auto out = members(sa[e], n, false);
    if (in.size() < 2 || out.size() < 2) continue;
    if (out.size() < in.size() || (out.size() == in.size() && out < in)) std::swap(in, out);
    ClusterSplit c{std::move(in), std::move(out), e, it->second};
    if (!best || c.cluster.size() > best->cluster.size() ||
        (c.cluster.size() == best->cluster.size() && c.cluster < best->cluster))
      best = std::move(c);
  }
  return best;
}

PlaceholderPair placeholder_instances(const TreePair& pair, const ClusterSplit& split) {
  PlaceholderPair p;
  p.rho1 = unused_label(pair.first, "_rho1");
  p.rho2 = unused_label(pair.first, "_rho2");
  p.inner = with_placeholder(pair, split.cluster, split.complement.front(), p.rho1);
  p.outer = with_placeholder(pair, split.complement, split.cluster.front(), p.rho2);
  return p;
}

SolveResult solve_with_clusters(const TreePair& pair, const SolverOptions& options) {
  require_same_taxa(pair);
  auto split = find_common_cluster(pair);
  if (!split) return solve_reduced(pair, options);
  PlaceholderPair inst = placeholder_instances(pair, *split);

  SolveResult free_a = solve_with_clusters(inst.inner, options);
  SolveResult free_b = solve_with_clusters(inst.outer, options);
  Part forced_a = forced_solve(inst.inner, inst.rho1, free_a, options);
  Part forced_b = forced_solve(inst.outer, inst.rho2, free_b, options);

  // No block crosses the split: both placeholders are singletons. Otherwise
  // one block crosses and the two placeholder blocks merge.
  const int split_upper = forced_a.objective_upper + forced_b.objective_upper - 1;
  const int join_upper = free_a.upper + free_b.upper;
  SolveResult res;
  res.instance = pair;
  res.lower = std::min(forced_a.objective_lower + forced_b.objective_lower - 1, free_a.lower + free_b.lower);
  res.upper = std::min(split_upper, join_upper);
  res.distance = res.upper;
  res.status = res.lower == res.upper ? SolveStatus::Optimal : SolveStatus::UpperBoundOnly;
  res.nodes_explored = free_a.nodes_explored + free_b.nodes_explored + forced_a.nodes + forced_b.nodes;
  res.dmp_lower_bound = std::max(free_a.dmp_lower_bound, free_b.dmp_lower_bound);
  res.num_vars = static_cast<int>(pair.first.num_edges());
  res.num_fixed = free_a.num_fixed + free_b.num_fixed;
  res.num_constraints = free_a.num_constraints + free_b.num_constraints;

  LabelForest forest;
  if (join_upper < split_upper) {
    LabelForest fa = free_a.forest, fb = free_b.forest;
    std::vector<std::string> ra, rb;
    drop_label(fa, inst.rho1, &ra);
    drop_label(fb, inst.rho2, &rb);
    forest = fa;
    forest.insert(forest.end(), fb.begin(), fb.end());
    ra.insert(ra.end(), rb.begin(), rb.end());
    if (!ra.empty()) forest.push_back(std::move(ra));
  } else {
    LabelForest fa = forced_a.forest, fb = forced_b.forest;
    drop_label(fa, inst.rho1, nullptr);
    drop_label(fb, inst.rho2, nullptr);
    forest = fa;
    forest.insert(forest.end(), fb.begin(), fb.end());
  }
  Partition part = to_partition(pair.first, forest);
  res.forest = to_labels(pair.first, part);
  res.cut_set = cut_set_from_forest(pair.first, part);
  return res;
}

}  // namespace tbrkit
