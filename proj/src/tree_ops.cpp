#include "tbrkit/tree_ops.hpp"

#include <algorithm>

namespace tbrkit {

namespace {

std::vector<std::pair<Vertex, Vertex>> edge_pairs(const PhyloTree& t) {
  std::vector<std::pair<Vertex, Vertex>> out;
  out.reserve(t.num_edges());
  for (const Edge& e : t.edges()) out.push_back({e.u, e.v});
  return out;
}

}  // namespace

Quartet Quartet::make(Taxon a, Taxon b, Taxon c, Taxon d) {
  std::array<Taxon, 2> l{std::min(a, b), std::max(a, b)};
  std::array<Taxon, 2> r{std::min(c, d), std::max(c, d)};
  if (r[0] < l[0]) std::swap(l, r);
  return {l, r};
}

std::string to_string(const Quartet& q, const PhyloTree& tree) {
  return tree.label(q.left[0]) + "," + tree.label(q.left[1]) + "|" + tree.label(q.right[0]) + "," +
         tree.label(q.right[1]);
}

PhyloTree restrict_taxa(const PhyloTree& tree, std::span<const Taxon> keep) {
  if (keep.empty()) throw TreeError("restriction to an empty taxon set");
  std::vector<std::string> labels(tree.num_vertices());
  for (Taxon x : keep) {
    if (x < 0 || x >= static_cast<Taxon>(tree.num_taxa())) throw TreeError("taxon outside the tree");
    labels[x] = tree.label(x);
  }
  if (tree.num_taxa() == 1) return tree;
  return PhyloTree::from_graph(labels, edge_pairs(tree));
}

PhyloTree restrict_tree(const PhyloTree& tree, std::span<const std::string> keep) {
  std::vector<Taxon> taxa;
  taxa.reserve(keep.size());
  for (const auto& l : keep) taxa.push_back(tree.taxon(l));
  return restrict_taxa(tree, taxa);
}

PhyloTree relabel(const PhyloTree& tree, Taxon taxon, const std::string& new_label) {
  std::vector<std::string> labels(tree.num_vertices());
  for (std::size_t i = 0; i < tree.num_taxa(); ++i) labels[i] = tree.label(static_cast<Taxon>(i));
  labels.at(taxon) = new_label;
  return PhyloTree::from_graph(labels, edge_pairs(tree));
}

std::vector<int> bfs_distances(const PhyloTree& tree, Vertex from) {
  std::vector<int> dist(tree.num_vertices(), -1);
  std::vector<Vertex> queue{from};
  dist[from] = 0;
  for (std::size_t i = 0; i < queue.size(); ++i) {
    Vertex v = queue[i];
    for (Vertex w : tree.neighbors(v)) {
      if (dist[w] < 0) {
        dist[w] = dist[v] + 1;
        queue.push_back(w);
      }
    }
  }
  return dist;
}

namespace {

Quartet from_distances(Taxon a, Taxon b, Taxon c, Taxon d, int ab, int cd, int ac, int bd, int ad,
                       int bc) {
  int s1 = ab + cd, s2 = ac + bd, s3 = ad + bc;
  if (s1 < s2 && s1 < s3) return Quartet::make(a, b, c, d);
  if (s2 < s1 && s2 < s3) return Quartet::make(a, c, b, d);
  return Quartet::make(a, d, b, c);
}

void check_four(const PhyloTree& tree, std::array<Taxon, 4> q) {
  for (Taxon x : q)
    if (x < 0 || x >= static_cast<Taxon>(tree.num_taxa())) throw TreeError("taxon outside the tree");
  std::sort(q.begin(), q.end());
  if (std::adjacent_find(q.begin(), q.end()) != q.end()) throw TreeError("quartet taxa must be distinct");
}

}  // namespace

Quartet quartet_topology(const PhyloTree& tree, Taxon a, Taxon b, Taxon c, Taxon d) {
  check_four(tree, {a, b, c, d});
  auto da = bfs_distances(tree, a);
  auto db = bfs_distances(tree, b);
  auto dc = bfs_distances(tree, c);
  return from_distances(a, b, c, d, da[b], dc[d], da[c], db[d], da[d], db[c]);
}

Quartet quartet_topology(const PhyloTree& tree, const std::array<std::string, 4>& taxa) {
  return quartet_topology(tree, tree.taxon(taxa[0]), tree.taxon(taxa[1]), tree.taxon(taxa[2]),
                          tree.taxon(taxa[3]));
}

LeafPaths::LeafPaths(const PhyloTree& tree)
    : n_(static_cast<int>(tree.num_taxa())), nv_(static_cast<int>(tree.num_vertices())) {
  dist_.assign(static_cast<std::size_t>(n_) * n_, 0);
  toward_.assign(static_cast<std::size_t>(n_) * nv_, -1);
  next_.assign(static_cast<std::size_t>(n_) * nv_, -1);
  std::vector<int> dist(nv_);
  std::vector<Vertex> queue;
  for (Taxon a = 0; a < n_; ++a) {
    std::fill(dist.begin(), dist.end(), -1);
    queue.assign({a});
    dist[a] = 0;
    EdgeId* toward = &toward_[static_cast<std::size_t>(a) * nv_];
    Vertex* next = &next_[static_cast<std::size_t>(a) * nv_];
    for (std::size_t i = 0; i < queue.size(); ++i) {
      Vertex v = queue[i];
      auto nb = tree.neighbors(v);
      auto inc = tree.incident_edges(v);
      for (std::size_t s = 0; s < nb.size(); ++s) {
        Vertex w = nb[s];
        if (dist[w] >= 0) continue;
        dist[w] = dist[v] + 1;
        toward[w] = inc[s];
        next[w] = v;
        queue.push_back(w);
      }
    }
    for (Taxon b = 0; b < n_; ++b) dist_[a * n_ + b] = dist[b];
  }
}

Quartet LeafPaths::topology(Taxon a, Taxon b, Taxon c, Taxon d) const {
  return from_distances(a, b, c, d, distance(a, b), distance(c, d), distance(a, c), distance(b, d),
                        distance(a, d), distance(b, c));
}

std::vector<EdgeId> LeafPaths::path_edges(Taxon a, Taxon b) const {
  std::vector<EdgeId> out;
  const EdgeId* toward = &toward_[static_cast<std::size_t>(a) * nv_];
  const Vertex* next = &next_[static_cast<std::size_t>(a) * nv_];
  for (Vertex v = b; v != a; v = next[v]) out.push_back(toward[v]);
  return out;
}

std::vector<char> spanning_vertices(const PhyloTree& tree, std::span<const Taxon> taxa) {
  const int nv = static_cast<int>(tree.num_vertices());
  std::vector<char> in(nv, 0);
  if (taxa.empty()) return in;
  if (taxa.size() == 1) {
    in[taxa[0]] = 1;
    return in;
  }
  // Root at the first taxon and count members below each vertex.
  std::vector<char> member(nv, 0);
  for (Taxon x : taxa) member[x] = 1;
  const Vertex root = taxa[0];
  std::vector<Vertex> order{root}, par(nv, -1);
  par[root] = root;
  for (std::size_t i = 0; i < order.size(); ++i)
    for (Vertex w : tree.neighbors(order[i]))
      if (par[w] == -1) {
        par[w] = order[i];
        order.push_back(w);
      }
  std::vector<int> below(nv, 0);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Vertex v = *it;
    below[v] += member[v];
    if (v != root) below[par[v]] += below[v];
  }
  // The root is itself a member, so any vertex with a member beneath it lies
  // on a path between two members.
  for (Vertex v = 0; v < nv; ++v) in[v] = (v == root) || below[v] > 0;
  return in;
}

int leaf_diameter(const PhyloTree& tree) {
  if (tree.num_taxa() < 2) return 0;
  auto d0 = bfs_distances(tree, 0);
  Taxon far = 0;
  for (Taxon x = 0; x < static_cast<Taxon>(tree.num_taxa()); ++x)
    if (d0[x] > d0[far]) far = x;
  auto d1 = bfs_distances(tree, far);
  int best = 0;
  for (Taxon x = 0; x < static_cast<Taxon>(tree.num_taxa()); ++x) best = std::max(best, d1[x]);
  return best;
}

}  // namespace tbrkit
