#include "tbrkit/phylo_tree.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_set>

namespace tbrkit {

PhyloTree PhyloTree::from_graph(std::span<const std::string> vertex_labels,
                                std::span<const std::pair<Vertex, Vertex>> edges) {
  const int nv = static_cast<int>(vertex_labels.size());
  if (nv == 0) throw TreeError("tree has no vertices");
  if (edges.size() != static_cast<std::size_t>(nv - 1)) throw TreeError("graph is not a tree");

  std::vector<std::vector<Vertex>> adj(nv);
  for (auto [a, b] : edges) {
    if (a < 0 || b < 0 || a >= nv || b >= nv || a == b) throw TreeError("invalid edge endpoint");
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  {
    std::vector<char> seen(nv, 0);
    std::vector<Vertex> stack{0};
    seen[0] = 1;
    int count = 1;
    while (!stack.empty()) {
      Vertex v = stack.back();
      stack.pop_back();
      for (Vertex w : adj[v]) {
        if (!seen[w]) {
          seen[w] = 1;
          ++count;
          stack.push_back(w);
        }
      }
    }
    if (count != nv) throw TreeError("graph is not connected");
  }

  auto labeled = [&](Vertex v) { return !vertex_labels[v].empty(); };
  std::vector<char> alive(nv, 1);
  std::vector<int> deg(nv);
  std::vector<Vertex> queue;
  for (Vertex v = 0; v < nv; ++v) {
    deg[v] = static_cast<int>(adj[v].size());
    if (!labeled(v) && deg[v] <= 1) queue.push_back(v);
  }
  while (!queue.empty()) {
    Vertex v = queue.back();
    queue.pop_back();
    if (!alive[v] || deg[v] > 1) continue;
    alive[v] = 0;
    for (Vertex w : adj[v]) {
      if (alive[w] && --deg[w] <= 1 && !labeled(w)) queue.push_back(w);
    }
  }

  std::vector<std::vector<Vertex>> g(nv);
  for (Vertex v = 0; v < nv; ++v) {
    if (!alive[v]) continue;
    for (Vertex w : adj[v])
      if (alive[w]) g[v].push_back(w);
  }
  for (Vertex v = 0; v < nv; ++v) {
    if (!alive[v] || labeled(v) || g[v].size() != 2) continue;
    Vertex a = g[v][0], b = g[v][1];
    std::replace(g[a].begin(), g[a].end(), v, b);
    std::replace(g[b].begin(), g[b].end(), v, a);
    alive[v] = 0;
    g[v].clear();
  }

  std::vector<Vertex> leaves;
  int internal_count = 0;
  for (Vertex v = 0; v < nv; ++v) {
    if (!alive[v]) continue;
    if (labeled(v)) {
      if (g[v].size() > 1) throw TreeError("labeled vertex '" + vertex_labels[v] + "' is not a leaf");
      leaves.push_back(v);
    } else {
      if (g[v].size() != 3) throw TreeError("internal vertex of degree other than 3");
      ++internal_count;
    }
  }
  if (leaves.empty()) throw TreeError("tree has no taxa");
  std::sort(leaves.begin(), leaves.end(),
            [&](Vertex a, Vertex b) { return vertex_labels[a] < vertex_labels[b]; });
  for (std::size_t i = 1; i < leaves.size(); ++i)
    if (vertex_labels[leaves[i]] == vertex_labels[leaves[i - 1]])
      throw TreeError("duplicate label '" + vertex_labels[leaves[i]] + "'");

  const int n = static_cast<int>(leaves.size());
  PhyloTree t;
  for (Vertex v : leaves) t.labels_.push_back(vertex_labels[v]);
  const int total = n + internal_count;
  t.adj_.assign(total, {-1, -1, -1});
  t.inc_.assign(total, {-1, -1, -1});
  t.deg_.assign(total, 0);

  if (n == 1) return t;
  if (n == 2) {
    t.adj_[0][0] = 1;
    t.adj_[1][0] = 0;
    t.inc_[0][0] = t.inc_[1][0] = 0;
    t.deg_[0] = t.deg_[1] = 1;
    t.edges_.push_back({0, 1});
    return t;
  }

  std::vector<int> taxon_of(nv, -1);
  for (int i = 0; i < n; ++i) taxon_of[leaves[i]] = i;

  // Rooted at leaf 0: parent pointers and a postorder to get subtree minima.
  const Vertex root = leaves[0];
  std::vector<Vertex> par(nv, -1), order;
  order.reserve(total);
  std::vector<Vertex> stack{root};
  par[root] = root;
  while (!stack.empty()) {
    Vertex v = stack.back();
    stack.pop_back();
    order.push_back(v);
    for (Vertex w : g[v]) {
      if (par[w] == -1) {
        par[w] = v;
        stack.push_back(w);
      }
    }
  }
  std::vector<int> min_taxon(nv, n);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Vertex v = *it;
    if (taxon_of[v] >= 0) min_taxon[v] = std::min(min_taxon[v], taxon_of[v]);
    if (v != root) min_taxon[par[v]] = std::min(min_taxon[par[v]], min_taxon[v]);
  }

  std::vector<Vertex> new_id(nv, -1);
  for (int i = 0; i < n; ++i) new_id[leaves[i]] = i;
  Vertex next_internal = n;
  std::vector<Vertex> pre;
  pre.reserve(total);
  stack.assign({g[root][0]});
  while (!stack.empty()) {
    Vertex v = stack.back();
    stack.pop_back();
    if (taxon_of[v] < 0) {
      new_id[v] = next_internal++;
      pre.push_back(v);
    }
    std::vector<Vertex> kids;
    for (Vertex w : g[v])
      if (w != par[v]) kids.push_back(w);
    std::sort(kids.begin(), kids.end(), [&](Vertex a, Vertex b) { return min_taxon[a] < min_taxon[b]; });
    for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(*it);
  }

  t.edges_.assign(2 * n - 3, {-1, -1});
  auto add_edge = [&](EdgeId id, Vertex up, Vertex down) {
    t.edges_[id] = {up, down};
    t.adj_[up][t.deg_[up]] = down;
    t.inc_[up][t.deg_[up]++] = id;
    t.adj_[down][t.deg_[down]] = up;
    t.inc_[down][t.deg_[down]++] = id;
  };
  // Each vertex lists its parent first, then its children in order.
  for (Vertex old : pre) {
    Vertex v = new_id[old];
    Vertex p = new_id[par[old]];
    add_edge(v == n ? 0 : v - 1, p, v);
    std::vector<Vertex> kids;
    for (Vertex w : g[old])
      if (w != par[old]) kids.push_back(w);
    std::sort(kids.begin(), kids.end(), [&](Vertex a, Vertex b) { return min_taxon[a] < min_taxon[b]; });
    for (Vertex w : kids)
      if (taxon_of[w] >= 0) add_edge(taxon_of[w], v, taxon_of[w]);
  }
  // add_edge appends in call order; restore parent-first, children-by-minimum.
  for (Vertex old : pre) {
    Vertex v = new_id[old];
    std::vector<std::pair<int, int>> slots;  // (key, slot)
    for (int s = 0; s < t.deg_[v]; ++s) {
      Vertex w = t.adj_[v][s];
      int key = (w == new_id[par[old]]) ? -1 : min_taxon[w < n ? leaves[w] : pre[w - n]];
      slots.push_back({key, s});
    }
    std::sort(slots.begin(), slots.end());
    std::array<Vertex, 3> a = t.adj_[v];
    std::array<EdgeId, 3> e = t.inc_[v];
    for (int s = 0; s < t.deg_[v]; ++s) {
      t.adj_[v][s] = a[slots[s].second];
      t.inc_[v][s] = e[slots[s].second];
    }
  }
  return t;
}

std::optional<Taxon> PhyloTree::find_taxon(std::string_view label) const {
  auto it = std::lower_bound(labels_.begin(), labels_.end(), label);
  if (it == labels_.end() || *it != label) return std::nullopt;
  return static_cast<Taxon>(it - labels_.begin());
}

Taxon PhyloTree::taxon(std::string_view label) const {
  if (auto x = find_taxon(label)) return *x;
  throw TreeError("unknown taxon '" + std::string(label) + "'");
}

EdgeId PhyloTree::edge_between(Vertex a, Vertex b) const {
  for (int s = 0; s < deg_[a]; ++s)
    if (adj_[a][s] == b) return inc_[a][s];
  return -1;
}

Vertex PhyloTree::parent(Taxon x) const {
  if (num_taxa() < 2) throw TreeError("single-vertex tree has no parents");
  return adj_.at(x)[0];
}

EdgeId PhyloTree::pendant_edge(Taxon x) const {
  if (num_taxa() < 2) throw TreeError("single-vertex tree has no edges");
  return inc_.at(x)[0];
}

bool PhyloTree::is_cherry(Taxon a, Taxon b) const {
  return a != b && num_taxa() >= 3 && parent(a) == parent(b);
}

std::optional<Taxon> PhyloTree::cherry_partner(Taxon x) const {
  if (num_taxa() < 3) return std::nullopt;
  for (Vertex w : neighbors(parent(x)))
    if (w != x && is_leaf(w)) return w;
  return std::nullopt;
}

void require_same_taxa(const TreePair& pair) {
  if (pair.first.labels() != pair.second.labels())
    throw TreeError("trees are on different taxon sets");
}

}  // namespace tbrkit
