#include "tbrkit/tbr.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace tbrkit {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t root, std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = splitmix64(root);
  for (std::uint64_t p : path) h = splitmix64(h ^ splitmix64(p + 0x632be59bd9b4e019ULL));
  return h;
}

std::uint64_t uniform_below(Rng& rng, std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("uniform_below(0)");
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t x;
  do x = rng();
  while (x >= limit);
  return x % n;
}

double uniform_unit(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

TbrSides tbr_sides(const PhyloTree& tree, EdgeId cut) {
  if (cut < 0 || cut >= static_cast<EdgeId>(tree.num_edges())) throw TreeError("invalid cut edge");
  const Edge ce = tree.edge(cut);
  TbrSides sides{cut, {ce.u, ce.v}, {}};
  std::vector<char> seen(tree.num_vertices(), 0);
  seen[ce.u] = seen[ce.v] = 1;
  for (int s = 0; s < 2; ++s) {
    Vertex r = sides.root[s];
    if (tree.is_leaf(r)) continue;
    // r disappears once suppressed; its two remaining edges become one.
    std::vector<EdgeId> at_root;
    for (EdgeId f : tree.incident_edges(r))
      if (f != cut) at_root.push_back(f);
    std::vector<EdgeId>& out = sides.attach[s];
    out.push_back(std::min(at_root[0], at_root[1]));
    std::vector<Vertex> stack;
    for (Vertex w : tree.neighbors(r))
      if (!seen[w]) {
        seen[w] = 1;
        stack.push_back(w);
      }
    while (!stack.empty()) {
      Vertex v = stack.back();
      stack.pop_back();
      auto nb = tree.neighbors(v);
      auto inc = tree.incident_edges(v);
      for (std::size_t i = 0; i < nb.size(); ++i) {
        if (seen[nb[i]]) continue;
        seen[nb[i]] = 1;
        out.push_back(inc[i]);
        stack.push_back(nb[i]);
      }
    }
    std::sort(out.begin(), out.end());
  }
  return sides;
}

PhyloTree apply_tbr_move(const PhyloTree& tree, EdgeId cut, int attach_u, int attach_v) {
  TbrSides sides = tbr_sides(tree, cut);
  std::vector<std::string> labels(tree.num_vertices());
  for (std::size_t i = 0; i < tree.num_taxa(); ++i) labels[i] = tree.label(static_cast<Taxon>(i));
  std::vector<char> removed(tree.num_edges(), 0);
  removed[cut] = 1;
  std::vector<std::pair<Vertex, Vertex>> extra;
  std::array<Vertex, 2> end{};
  const int choice[2] = {attach_u, attach_v};
  for (int s = 0; s < 2; ++s) {
    const auto& list = sides.attach[s];
    if (list.empty()) {
      if (choice[s] != -1) throw TreeError("attachment on a side with no edges");
      end[s] = sides.root[s];
      continue;
    }
    if (choice[s] < 0 || choice[s] >= static_cast<int>(list.size()))
      throw TreeError("attachment point outside its component");
    EdgeId f = list[choice[s]];
    Edge fe = tree.edge(f);
    Vertex mid = static_cast<Vertex>(labels.size());
    labels.emplace_back();
    removed[f] = 1;
    extra.push_back({fe.u, mid});
    extra.push_back({mid, fe.v});
    end[s] = mid;
  }
  std::vector<std::pair<Vertex, Vertex>> edges;
  for (EdgeId e = 0; e < static_cast<EdgeId>(tree.num_edges()); ++e)
    if (!removed[e]) edges.push_back({tree.edge(e).u, tree.edge(e).v});
  edges.insert(edges.end(), extra.begin(), extra.end());
  edges.push_back({end[0], end[1]});
  return PhyloTree::from_graph(labels, edges);
}

PhyloTree random_tbr_move(const PhyloTree& tree, Rng& rng) {
  if (tree.num_edges() == 0) return tree;
  EdgeId cut = static_cast<EdgeId>(uniform_below(rng, tree.num_edges()));
  TbrSides sides = tbr_sides(tree, cut);
  int pick[2];
  for (int s = 0; s < 2; ++s)
    pick[s] = sides.attach[s].empty() ? -1 : static_cast<int>(uniform_below(rng, sides.attach[s].size()));
  return apply_tbr_move(tree, cut, pick[0], pick[1]);
}

PhyloTree random_tbr_walk(const PhyloTree& tree, int k, Rng& rng) {
  if (k < 0) throw std::invalid_argument("negative move count");
  PhyloTree t = tree;
  for (int i = 0; i < k; ++i) t = random_tbr_move(t, rng);
  return t;
}

namespace {

struct Builder {
  Rng& rng;
  int skew;
  std::vector<std::string> labels;
  std::vector<std::pair<Vertex, Vertex>> edges;

  Vertex build(const std::vector<int>& taxa) {
    if (taxa.size() == 1) {
      labels.push_back(std::to_string(taxa[0]));
      return static_cast<Vertex>(labels.size()) - 1;
    }
    std::vector<int> left, right;
    if (skew == 0 || skew == 100) {
      std::size_t odd = uniform_below(rng, taxa.size());
      for (std::size_t i = 0; i < taxa.size(); ++i) ((i == odd) == (skew == 0) ? left : right).push_back(taxa[i]);
    } else {
      const double p = skew / 100.0;
      do {
        left.clear();
        right.clear();
        for (int x : taxa) (uniform_unit(rng) < p ? left : right).push_back(x);
      } while (left.empty() || right.empty());
    }
    labels.emplace_back();
    Vertex v = static_cast<Vertex>(labels.size()) - 1;
    Vertex a = build(left);
    Vertex b = build(right);
    edges.push_back({v, a});
    edges.push_back({v, b});
    return v;
  }
};

}  // namespace

PhyloTree random_tree(int t, int skew, Rng& rng) {
  if (t < 1) throw std::invalid_argument("random_tree needs at least one taxon");
  if (skew < 0 || skew > 100) throw std::invalid_argument("skew must lie in [0, 100]");
  std::vector<int> taxa(t);
  for (int i = 0; i < t; ++i) taxa[i] = i + 1;
  Builder b{rng, skew, {}, {}};
  b.build(taxa);
  return PhyloTree::from_graph(b.labels, b.edges);
}

PhyloTree caterpillar(const std::vector<std::string>& order) {
  if (order.empty()) throw TreeError("caterpillar needs at least one taxon");
  std::vector<std::string> labels{order[0]};
  std::vector<std::pair<Vertex, Vertex>> edges;
  Vertex spine = 0;
  for (std::size_t i = 1; i < order.size(); ++i) {
    labels.emplace_back();
    Vertex w = static_cast<Vertex>(labels.size()) - 1;
    labels.push_back(order[i]);
    edges.push_back({spine, w});
    edges.push_back({w, w + 1});
    spine = w;
  }
  return PhyloTree::from_graph(labels, edges);
}

}  // namespace tbrkit
