// Small exhaustive helpers shared by the unit tests and the acceptance run.
#pragma once

#include <algorithm>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "tbrkit/bounds.hpp"
#include "tbrkit/phylo_tree.hpp"

namespace tbrkit::testing {

inline std::vector<std::string> letters(int n) {
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.emplace_back(1, static_cast<char>('a' + i));
  return out;
}

// Every unrooted binary tree on the given labels (at least three), by
// stepwise addition.
inline std::vector<PhyloTree> all_trees(const std::vector<std::string>& labels) {
  struct Graph {
    std::vector<std::string> names;
    std::vector<std::pair<Vertex, Vertex>> edges;
  };
  Graph star{{labels[0], labels[1], labels[2], ""}, {{0, 3}, {1, 3}, {2, 3}}};
  std::vector<Graph> cur{star};
  for (std::size_t i = 3; i < labels.size(); ++i) {
    std::vector<Graph> next;
    for (const Graph& g : cur) {
      for (std::size_t e = 0; e < g.edges.size(); ++e) {
        Graph h = g;
        auto [a, b] = h.edges[e];
        Vertex w = static_cast<Vertex>(h.names.size());
        h.names.emplace_back();
        Vertex leaf = w + 1;
        h.names.push_back(labels[i]);
        h.edges[e] = {a, w};
        h.edges.push_back({w, b});
        h.edges.push_back({w, leaf});
        next.push_back(std::move(h));
      }
    }
    cur = std::move(next);
  }
  std::vector<PhyloTree> out;
  for (const Graph& g : cur) out.push_back(PhyloTree::from_graph(g.names, g.edges));
  return out;
}

// Minimum number of bichromatic edges over every assignment of states
// 0..num_states-1 to the internal vertices.
inline int brute_parsimony(const PhyloTree& tree, const std::vector<int>& state, int num_states) {
  const int n = static_cast<int>(tree.num_taxa());
  const int nv = static_cast<int>(tree.num_vertices());
  std::vector<int> s(nv, 0);
  for (int x = 0; x < n; ++x) s[x] = state[x];
  int best = nv;
  std::function<void(int)> go = [&](int v) {
    if (v == nv) {
      int c = 0;
      for (const Edge& e : tree.edges()) c += s[e.u] != s[e.v];
      best = std::min(best, c);
      return;
    }
    for (int k = 0; k < num_states; ++k) {
      s[v] = k;
      go(v + 1);
    }
  };
  go(n);
  return best;
}

// Calls f for every set partition of 0..n-1 as a restricted growth string.
inline void for_each_partition(int n, const std::function<void(const std::vector<int>&)>& f) {
  std::vector<int> a(n, 0);
  std::function<void(int, int)> go = [&](int i, int blocks) {
    if (i == n) {
      f(a);
      return;
    }
    for (int k = 0; k <= blocks; ++k) {
      a[i] = k;
      go(i + 1, std::max(blocks, k + 1));
    }
  };
  go(0, 0);
}

// Characters convex on `tree` whose states each hold at least p taxa, found
// by brute force: convex exactly when the parsimony score is states - 1.
inline std::vector<std::vector<int>> convex_characters(const PhyloTree& tree, int p) {
  std::vector<std::vector<int>> out;
  for_each_partition(static_cast<int>(tree.num_taxa()), [&](const std::vector<int>& a) {
    int k = *std::max_element(a.begin(), a.end()) + 1;
    std::vector<int> size(k, 0);
    for (int s : a) ++size[s];
    if (*std::min_element(size.begin(), size.end()) < p) return;
    if (brute_parsimony(tree, a, k) == k - 1) out.push_back(a);
  });
  return out;
}

}  // namespace tbrkit::testing
