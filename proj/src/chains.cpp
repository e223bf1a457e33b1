#include "tbrkit/chains.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace tbrkit {

std::vector<Vertex> chain_walk(const PhyloTree& tree, std::span<const Taxon> seq) {
  const std::size_t n = seq.size();
  if (tree.num_taxa() < 4 || n < 2) return {};
  {
    std::vector<Taxon> sorted(seq.begin(), seq.end());
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) return {};
  }
  std::vector<Vertex> walk;
  walk.reserve(n);
  std::vector<Vertex> path;  // distinct parents in walk order
  for (std::size_t i = 0; i < n; ++i) {
    Vertex q = tree.parent(seq[i]);
    walk.push_back(q);
    if (i == 0) {
      path.push_back(q);
      continue;
    }
    if (q == path.back()) {
      // Shared parent: allowed for the first pair or the last pair only.
      if (i != 1 && i != n - 1) return {};
      if (i == n - 1 && n > 2 && walk[n - 2] == walk[n - 3]) return {};
      continue;
    }
    if (!tree.adjacent(path.back(), q)) return {};
    if (std::find(path.begin(), path.end(), q) != path.end()) return {};
    path.push_back(q);
  }
  return walk;
}

bool is_chain(const PhyloTree& tree, std::span<const Taxon> seq) { return !chain_walk(tree, seq).empty(); }

bool is_pendant_chain(const PhyloTree& tree, std::span<const Taxon> seq) {
  auto w = chain_walk(tree, seq);
  if (w.empty()) return false;
  return w[0] == w[1] || w[w.size() - 2] == w.back();
}

bool is_common_chain(const TreePair& pair, std::span<const Taxon> seq) {
  return is_chain(pair.first, seq) && is_chain(pair.second, seq);
}

namespace {

// Taxa that could follow `seq` in a chain of `tree`: leaves at the last parent
// or at one of its internal neighbours.
std::vector<Taxon> extension_candidates(const PhyloTree& tree, const std::vector<Taxon>& seq) {
  std::vector<Taxon> out;
  Vertex back = tree.parent(seq.back());
  auto consider = [&](Vertex w) {
    if (tree.is_leaf(w) && std::find(seq.begin(), seq.end(), w) == seq.end()) out.push_back(w);
  };
  for (Vertex w : tree.neighbors(back)) {
    if (tree.is_leaf(w)) {
      consider(w);
    } else {
      for (Vertex z : tree.neighbors(w)) consider(z);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void enumerate_from(const PhyloTree& tree, std::vector<Taxon>& seq, int len,
                    std::vector<std::vector<Taxon>>& out) {
  if (static_cast<int>(seq.size()) == len) {
    out.push_back(seq);
    return;
  }
  for (Taxon x : extension_candidates(tree, seq)) {
    seq.push_back(x);
    if (seq.size() < 2 || is_chain(tree, seq)) enumerate_from(tree, seq, len, out);
    seq.pop_back();
  }
}

void common_from(const TreePair& pair, std::vector<Taxon>& seq, int min_len,
                 std::set<std::vector<Taxon>>& found) {
  bool extended = false;
  for (Taxon x : extension_candidates(pair.first, seq)) {
    seq.push_back(x);
    if (is_common_chain(pair, seq)) {
      extended = true;
      common_from(pair, seq, min_len, found);
    }
    seq.pop_back();
  }
  if (extended || static_cast<int>(seq.size()) < min_len) return;
  // Front extension is back extension of the reversal.
  std::vector<Taxon> rev(seq.rbegin(), seq.rend());
  for (Taxon x : extension_candidates(pair.first, rev)) {
    rev.push_back(x);
    bool ok = is_common_chain(pair, rev);
    rev.pop_back();
    if (ok) return;
  }
  if (seq.front() < seq.back()) found.insert(seq);
}

}  // namespace

std::vector<std::vector<Taxon>> enumerate_chains(const PhyloTree& tree, int len) {
  std::vector<std::vector<Taxon>> out;
  if (tree.num_taxa() < 4 || len < 2) return out;
  std::vector<Taxon> seq;
  for (Taxon x = 0; x < static_cast<Taxon>(tree.num_taxa()); ++x) {
    seq.assign({x});
    enumerate_from(tree, seq, len, out);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<ChainDescriptor> find_common_chains(const TreePair& pair, int min_len) {
  require_same_taxa(pair);
  if (min_len < 2) throw std::invalid_argument("chains have at least two taxa");
  std::vector<ChainDescriptor> out;
  if (pair.first.num_taxa() < 4) return out;
  std::set<std::vector<Taxon>> found;
  std::vector<Taxon> seq;
  for (Taxon x = 0; x < static_cast<Taxon>(pair.first.num_taxa()); ++x) {
    seq.assign({x});
    common_from(pair, seq, min_len, found);
  }
  for (const auto& s : found) {
    ChainDescriptor c;
    c.taxa = s;
    c.walk_first = chain_walk(pair.first, s);
    c.walk_second = chain_walk(pair.second, s);
    c.pendant_first = is_pendant_chain(pair.first, s);
    c.pendant_second = is_pendant_chain(pair.second, s);
    out.push_back(std::move(c));
  }
  return out;
}

namespace {

// Hash-consed rooted shapes of the subtrees below directed edges. Leaves get
// their taxon index; an internal vertex gets an id for its sorted child pair.
class ShapeTable {
 public:
  explicit ShapeTable(int num_taxa) : n_(num_taxa) {
    for (int i = 0; i < n_; ++i) size_.push_back(1);
  }

  // Shape of the subtree containing `child` after cutting edge {parent, child}.
  // Memoized per tree by directed edge index.
  int shape(const PhyloTree& t, std::vector<int>& memo, Vertex parent, Vertex child) {
    EdgeId e = t.edge_between(parent, child);
    int slot = 2 * e + (t.edge(e).u == parent ? 0 : 1);
    if (memo[slot] >= 0) return memo[slot];
    int id;
    if (t.is_leaf(child)) {
      id = child;
    } else {
      int kids[2], k = 0;
      for (Vertex w : t.neighbors(child))
        if (w != parent) kids[k++] = shape(t, memo, child, w);
      std::pair<int, int> key{std::min(kids[0], kids[1]), std::max(kids[0], kids[1])};
      auto [it, inserted] = ids_.try_emplace(key, static_cast<int>(size_.size()));
      if (inserted) size_.push_back(size_[key.first] + size_[key.second]);
      id = it->second;
    }
    return memo[slot] = id;
  }

  int size(int id) const { return size_[id]; }

 private:
  int n_;
  std::map<std::pair<int, int>, int> ids_;
  std::vector<int> size_;
};

std::vector<Taxon> taxa_below(const PhyloTree& t, Vertex parent, Vertex child) {
  std::vector<Taxon> out;
  std::vector<std::pair<Vertex, Vertex>> stack{{parent, child}};
  while (!stack.empty()) {
    auto [p, v] = stack.back();
    stack.pop_back();
    if (t.is_leaf(v)) {
      out.push_back(v);
      continue;
    }
    for (Vertex w : t.neighbors(v))
      if (w != p) stack.push_back({v, w});
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::vector<std::vector<Taxon>> find_common_pendant_subtrees(const TreePair& pair) {
  require_same_taxa(pair);
  const PhyloTree& a = pair.first;
  const PhyloTree& b = pair.second;
  const int n = static_cast<int>(a.num_taxa());
  std::vector<std::vector<Taxon>> out;
  if (n < 3) return out;

  ShapeTable table(n);
  std::vector<int> memo_a(2 * a.num_edges(), -1), memo_b(2 * b.num_edges(), -1);
  std::map<int, std::pair<Vertex, Vertex>> in_a;  // shape -> directed edge of a
  for (const Edge& e : a.edges()) {
    for (auto [p, c] : {std::pair{e.u, e.v}, std::pair{e.v, e.u}}) {
      int id = table.shape(a, memo_a, p, c);
      if (table.size(id) >= 2) in_a.try_emplace(id, std::pair{p, c});
    }
  }
  std::set<int> common;
  for (const Edge& e : b.edges()) {
    for (auto [p, c] : {std::pair{e.u, e.v}, std::pair{e.v, e.u}}) {
      int id = table.shape(b, memo_b, p, c);
      if (in_a.count(id)) common.insert(id);
    }
  }

  std::vector<std::vector<Taxon>> sets;
  std::vector<std::vector<char>> member;
  for (int id : common) {
    auto [p, c] = in_a[id];
    sets.push_back(taxa_below(a, p, c));
    std::vector<char> m(n, 0);
    for (Taxon x : sets.back()) m[x] = 1;
    member.push_back(std::move(m));
  }
  for (std::size_t i = 0; i < sets.size(); ++i) {
    bool maximal = true;
    for (std::size_t j = 0; j < sets.size() && maximal; ++j) {
      if (i == j || sets[j].size() <= sets[i].size()) continue;
      if (std::all_of(sets[i].begin(), sets[i].end(), [&](Taxon x) { return member[j][x]; }))
        maximal = false;
    }
    if (maximal) out.push_back(sets[i]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace tbrkit
