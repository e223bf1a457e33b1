#include "tbrkit/bounds.hpp"

#include <algorithm>
#include <bit>
#include <boost/random/uniform_int_distribution.hpp>
#include <chrono>
#include <stdexcept>

namespace tbrkit {

Character Character::from_states(std::vector<int> raw) {
  Character f;
  std::vector<std::pair<int, int>> seen;  // raw state -> new id
  std::vector<int> sizes;
  for (int& s : raw) {
    auto it = std::find_if(seen.begin(), seen.end(), [&](auto& p) { return p.first == s; });
    if (it == seen.end()) {
      seen.push_back({s, static_cast<int>(seen.size())});
      sizes.push_back(0);
      it = seen.end() - 1;
    }
    s = it->second;
    ++sizes[s];
  }
  f.state = std::move(raw);
  f.num_states = static_cast<int>(seen.size());
  f.min_state_size = sizes.empty() ? 0 : *std::min_element(sizes.begin(), sizes.end());
  return f;
}

std::string Character::to_string(const PhyloTree& tree) const {
  std::string out;
  for (int s = 0; s < num_states; ++s) {
    if (s) out += '|';
    bool first = true;
    for (std::size_t x = 0; x < state.size(); ++x) {
      if (state[x] != s) continue;
      if (!first) out += ',';
      out += tree.label(static_cast<Taxon>(x));
      first = false;
    }
  }
  return out;
}

int fitch_score(const PhyloTree& tree, const Character& f) {
  const int n = static_cast<int>(tree.num_taxa());
  if (static_cast<int>(f.state.size()) != n) throw std::invalid_argument("character does not cover the taxa");
  if (n == 1) return 0;
  if (n == 2) return f.state[0] != f.state[1];
  const int words = std::max(1, (f.num_states + 63) / 64);
  const int nv = static_cast<int>(tree.num_vertices());
  std::vector<std::uint64_t> sets(static_cast<std::size_t>(nv) * words, 0);
  auto set_of = [&](Vertex v) { return sets.data() + static_cast<std::size_t>(v) * words; };
  for (Taxon x = 0; x < n; ++x) {
    int s = f.state[x];
    if (s < 0 || s >= f.num_states) throw std::invalid_argument("state out of range");
    set_of(x)[s / 64] |= std::uint64_t{1} << (s % 64);
  }
  int score = 0;
  // Internal vertices are numbered in preorder from leaf 0, so descending ids
  // visit children before parents.
  for (Vertex v = nv - 1; v >= n; --v) {
    auto nb = tree.neighbors(v);
    const std::uint64_t* a = set_of(nb[1]);
    const std::uint64_t* b = set_of(nb[2]);
    std::uint64_t* out = set_of(v);
    bool empty = true;
    for (int w = 0; w < words; ++w) {
      out[w] = a[w] & b[w];
      if (out[w]) empty = false;
    }
    if (empty) {
      ++score;
      for (int w = 0; w < words; ++w) out[w] = a[w] | b[w];
    }
  }
  const int s0 = f.state[0];
  if (!((set_of(n)[s0 / 64] >> (s0 % 64)) & 1)) ++score;
  return score;
}

ConvexCharacterSampler::ConvexCharacterSampler(const PhyloTree& tree, int p)
    : n_(static_cast<int>(tree.num_taxa())), p_(p) {
  if (p < 1) throw std::invalid_argument("minimum state size must be positive");
  if (n_ == 1) {
    total_ = p_ <= 1 ? 1 : 0;
    return;
  }
  const int nv = static_cast<int>(tree.num_vertices());
  nodes_.resize(nv);
  // Leaves first, then internal vertices children-first.
  auto order = [&](int i) { return i < n_ - 1 ? i + 1 : nv - 1 - (i - (n_ - 1)); };
  for (int i = 0; i < nv - 1; ++i) {
    const Vertex v = order(i);
    Node& node = nodes_[v];
    node.v = v;
    node.open.assign(p_ + 1, 0);
    if (tree.is_leaf(v)) {
      node.taxon = v;
    } else {
      auto nb = tree.neighbors(v);
      node.child[0] = nb[1];
      node.child[1] = nb[2];
    }
    fill(node);
  }
  top_ = tree.parent(0);
  const Node& top = nodes_[top_];
  total_ = p_ <= 1 ? top.closed : BigCount(0);
  for (int j = std::max(1, p_ - 1); j <= p_; ++j) total_ += top.open[j];
}

void ConvexCharacterSampler::fill(Node& node) const {
  if (node.taxon >= 0) {
    node.closed = p_ <= 1 ? 1 : 0;
    node.open[1] = 1;
    return;
  }
  const Node& a = nodes_[node.child[0]];
  const Node& b = nodes_[node.child[1]];
  node.closed = a.closed * b.closed;
  for (int j = 1; j <= p_; ++j) node.open[j] = a.open[j] * b.closed + a.closed * b.open[j];
  for (int j1 = 1; j1 <= p_; ++j1) {
    for (int j2 = 1; j2 <= p_; ++j2) {
      BigCount both = a.open[j1] * b.open[j2];
      if (both == 0) continue;
      if (j1 + j2 >= p_) node.closed += both;
      node.open[std::min(p_, j1 + j2)] += both;
    }
  }
}

namespace {

BigCount draw_below(const BigCount& n, Rng& rng) {
  boost::random::uniform_int_distribution<BigCount> dist(0, n - 1);
  return dist(rng);
}

}  // namespace

// state 0: closed; state j >= 1: open with j taxa (capped at p).
void ConvexCharacterSampler::sample_node(int idx, int state, int block, Rng& rng, std::vector<int>& out,
                                         int& next) const {
  const Node& node = nodes_[idx];
  if (node.taxon >= 0) {
    out[node.taxon] = state == 0 ? next++ : block;
    return;
  }
  const Node& a = nodes_[node.child[0]];
  const Node& b = nodes_[node.child[1]];
  BigCount r = draw_below(state == 0 ? node.closed : node.open[state], rng);
  auto take = [&](const BigCount& w) {
    if (r < w) return true;
    r -= w;
    return false;
  };
  if (state == 0) {
    if (take(a.closed * b.closed)) {
      sample_node(node.child[0], 0, -1, rng, out, next);
      sample_node(node.child[1], 0, -1, rng, out, next);
      return;
    }
    for (int j1 = 1; j1 <= p_; ++j1)
      for (int j2 = 1; j2 <= p_; ++j2)
        if (j1 + j2 >= p_ && take(a.open[j1] * b.open[j2])) {
          int fresh = next++;
          sample_node(node.child[0], j1, fresh, rng, out, next);
          sample_node(node.child[1], j2, fresh, rng, out, next);
          return;
        }
  } else {
    if (take(a.open[state] * b.closed)) {
      sample_node(node.child[0], state, block, rng, out, next);
      sample_node(node.child[1], 0, -1, rng, out, next);
      return;
    }
    if (take(a.closed * b.open[state])) {
      sample_node(node.child[0], 0, -1, rng, out, next);
      sample_node(node.child[1], state, block, rng, out, next);
      return;
    }
    for (int j1 = 1; j1 <= p_; ++j1)
      for (int j2 = 1; j2 <= p_; ++j2)
        if (std::min(p_, j1 + j2) == state && take(a.open[j1] * b.open[j2])) {
          sample_node(node.child[0], j1, block, rng, out, next);
          sample_node(node.child[1], j2, block, rng, out, next);
          return;
        }
  }
  throw std::logic_error("convex character sampler: counts inconsistent");
}

Character ConvexCharacterSampler::sample(Rng& rng) const {
  if (total_ == 0) throw std::invalid_argument("no eligible character exists");
  std::vector<int> out(n_, -1);
  int next = 0;
  if (n_ == 1) {
    out[0] = 0;
    return Character::from_states(out);
  }
  const Node& top = nodes_[top_];
  BigCount r = draw_below(total_, rng);
  BigCount single = p_ <= 1 ? top.closed : BigCount(0);
  if (r < single) {
    out[0] = next++;
    sample_node(top_, 0, -1, rng, out, next);
  } else {
    r -= single;
    int j = std::max(1, p_ - 1);
    for (; j < p_; ++j) {
      if (r < top.open[j]) break;
      r -= top.open[j];
    }
    int block = next++;
    out[0] = block;
    sample_node(top_, j, block, rng, out, next);
  }
  return Character::from_states(out);
}

bool BoundCell::raise(int v) {
  int cur = value_.load(std::memory_order_relaxed);
  while (v > cur) {
    if (value_.compare_exchange_weak(cur, v, std::memory_order_acq_rel)) return true;
  }
  return false;
}

BoundReport dmp_lower_bound(const TreePair& pair, const BoundBudget& budget, Rng& rng, BoundCell* cell) {
  require_same_taxa(pair);
  BoundReport rep;
  if (pair.first.num_taxa() < 4 || budget.samples <= 0) return rep;
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };
  const ConvexCharacterSampler samplers[2] = {ConvexCharacterSampler(pair.first, 2),
                                              ConvexCharacterSampler(pair.second, 2)};
  for (long i = 0; i < budget.samples; ++i) {
    if (budget.stop && budget.stop->load(std::memory_order_relaxed)) break;
    if (budget.time_cap_seconds > 0 && (i & 63) == 0 && elapsed() > budget.time_cap_seconds) break;
    int src = static_cast<int>(uniform_below(rng, 2));
    Character f = samplers[src].sample(rng);
    int diff = std::abs(fitch_score(pair.first, f) - fitch_score(pair.second, f));
    ++rep.samples_taken;
    if (diff > rep.value || !rep.best_character) {
      if (diff > rep.value && cell) cell->raise(diff);
      rep.value = std::max(rep.value, diff);
      rep.best_character = std::move(f);
      rep.best_source = src;
    }
  }
  rep.seconds = elapsed();
  return rep;
}

GreedyResult greedy_upper_bound(const HittingSetModel& model) {
  const int m = model.num_vars;
  const std::size_t rows = model.num_constraints();
  std::vector<char> chosen(m, 0), done(rows, 0);
  for (int v = 0; v < m; ++v)
    if (model.fixed_one[v]) chosen[v] = 1;
  std::vector<long> hits(m, 0);
  std::size_t open = 0;
  for (std::size_t i = 0; i < rows; ++i) {
    for (int v = 0; v < m; ++v)
      if (chosen[v] && model.row_has(i, v)) done[i] = 1;
    if (done[i]) continue;
    ++open;
    auto r = model.row(i);
    for (int w = 0; w < model.words; ++w)
      for (std::uint64_t bits = r[w]; bits; bits &= bits - 1) ++hits[w * 64 + std::countr_zero(bits)];
  }
  while (open > 0) {
    int best = -1;
    for (int v = 0; v < m; ++v) {
      if (chosen[v] || model.fixed_zero[v]) continue;
      if (best < 0 || hits[v] > hits[best]) best = v;
    }
    if (best < 0 || hits[best] == 0) throw std::logic_error("hitting-set model is infeasible");
    chosen[best] = 1;
    for (std::size_t i = 0; i < rows; ++i) {
      if (done[i] || !model.row_has(i, best)) continue;
      done[i] = 1;
      --open;
      auto r = model.row(i);
      for (int w = 0; w < model.words; ++w)
        for (std::uint64_t bits = r[w]; bits; bits &= bits - 1) --hits[w * 64 + std::countr_zero(bits)];
    }
  }
  GreedyResult res;
  for (int v = 0; v < m; ++v)
    if (chosen[v]) res.cut_set.push_back(v);
  res.value = static_cast<int>(res.cut_set.size());
  return res;
}

}  // namespace tbrkit
