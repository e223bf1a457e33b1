#include "tbrkit/maf_solver.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "tbrkit/cluster.hpp"

namespace tbrkit {

int HittingSetModel::num_fixed_zero() const {
  return static_cast<int>(std::count(fixed_zero.begin(), fixed_zero.end(), 1));
}

int HittingSetModel::num_free() const {
  int free = 0;
  for (int v = 0; v < num_vars; ++v) free += !fixed_zero[v] && !fixed_one[v];
  return free;
}

std::vector<Quartet> conflicting_quartets(const TreePair& pair) {
  require_same_taxa(pair);
  std::vector<Quartet> out;
  const Taxon n = static_cast<Taxon>(pair.first.num_taxa());
  if (n < 4) return out;
  LeafPaths pa(pair.first), pb(pair.second);
  for (Taxon a = 0; a < n; ++a)
    for (Taxon b = a + 1; b < n; ++b)
      for (Taxon c = b + 1; c < n; ++c)
        for (Taxon d = c + 1; d < n; ++d) {
          Quartet q = pa.topology(a, b, c, d);
          if (q != pb.topology(a, b, c, d)) out.push_back(q);
        }
  return out;
}

namespace {

// Longest contiguous run of `seq` avoiding `used`; earliest on ties.
std::vector<Taxon> longest_free_segment(const std::vector<Taxon>& seq, const std::vector<char>& used) {
  std::size_t best_start = 0, best_len = 0;
  for (std::size_t i = 0; i < seq.size();) {
    if (used[seq[i]]) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < seq.size() && !used[seq[j]]) ++j;
    if (j - i > best_len) {
      best_start = i;
      best_len = j - i;
    }
    i = j;
  }
  return {seq.begin() + best_start, seq.begin() + best_start + best_len};
}

bool qualifies(const TreePair& pair, const std::vector<Taxon>& seq) {
  if (seq.size() >= 3) return is_common_chain(pair, seq);
  if (seq.size() == 2)
    return is_common_chain(pair, seq) && (is_pendant_chain(pair.first, seq) || is_pendant_chain(pair.second, seq));
  return false;
}

}  // namespace

PreservedChains select_preserved_chains(const TreePair& pair) {
  require_same_taxa(pair);
  PreservedChains out;
  const PhyloTree& t = pair.first;
  if (t.num_taxa() < 4) return out;
  std::vector<std::vector<Taxon>> cands;
  for (auto& c : find_common_chains(pair, 2)) cands.push_back(std::move(c.taxa));
  std::vector<char> used(t.num_taxa(), 0);
  while (true) {
    int best = -1;
    for (int i = 0; i < static_cast<int>(cands.size()); ++i) {
      if (!qualifies(pair, cands[i])) continue;
      if (best < 0 || cands[i].size() > cands[best].size() ||
          (cands[i].size() == cands[best].size() && cands[i] < cands[best]))
        best = i;
    }
    if (best < 0) break;
    std::vector<Taxon> chosen = cands[best];
    for (Taxon x : chosen) used[x] = 1;
    ChainDescriptor c;
    c.taxa = chosen;
    c.walk_first = chain_walk(pair.first, chosen);
    c.walk_second = chain_walk(pair.second, chosen);
    c.pendant_first = is_pendant_chain(pair.first, chosen);
    c.pendant_second = is_pendant_chain(pair.second, chosen);
    out.chains.push_back(std::move(c));
    std::vector<std::vector<Taxon>> next;
    for (auto& cand : cands) {
      auto seg = longest_free_segment(cand, used);
      if (seg.size() >= 2) {
        if (seg.front() > seg.back()) std::reverse(seg.begin(), seg.end());
        next.push_back(std::move(seg));
      }
    }
    cands = std::move(next);
  }
  std::vector<char> fixed(t.num_edges(), 0);
  for (const auto& c : out.chains) {
    for (Taxon x : c.taxa) fixed[t.pendant_edge(x)] = 1;
    for (std::size_t i = 1; i < c.walk_first.size(); ++i)
      if (c.walk_first[i] != c.walk_first[i - 1]) fixed[t.edge_between(c.walk_first[i - 1], c.walk_first[i])] = 1;
  }
  for (EdgeId e = 0; e < static_cast<EdgeId>(fixed.size()); ++e)
    if (fixed[e]) out.fixed.push_back(e);
  return out;
}

HittingSetModel build_model(const TreePair& pair, bool preserve_chains) {
  require_same_taxa(pair);
  HittingSetModel m;
  m.tree = pair.first;
  const int n = static_cast<int>(pair.first.num_taxa());
  m.num_vars = static_cast<int>(pair.first.num_edges());
  m.words = std::max(1, (m.num_vars + 63) / 64);
  m.fixed_zero.assign(m.num_vars, 0);
  m.fixed_one.assign(m.num_vars, 0);
  if (n < 4) return m;
  m.quartets = conflicting_quartets(pair);
  LeafPaths paths(pair.first);
  const int w = m.words;
  std::vector<std::uint64_t> pair_bits(static_cast<std::size_t>(n) * n * w, 0);
  for (Taxon a = 0; a < n; ++a)
    for (Taxon b = a + 1; b < n; ++b) {
      std::uint64_t* bits = &pair_bits[(static_cast<std::size_t>(a) * n + b) * w];
      for (EdgeId e : paths.path_edges(a, b)) bits[e / 64] |= std::uint64_t{1} << (e % 64);
    }
  m.rows.assign(m.quartets.size() * w, 0);
  for (std::size_t i = 0; i < m.quartets.size(); ++i) {
    const Quartet& q = m.quartets[i];
    const std::uint64_t* l = &pair_bits[(static_cast<std::size_t>(q.left[0]) * n + q.left[1]) * w];
    const std::uint64_t* r = &pair_bits[(static_cast<std::size_t>(q.right[0]) * n + q.right[1]) * w];
    for (int k = 0; k < w; ++k) m.rows[i * w + k] = l[k] | r[k];
  }
  if (preserve_chains) {
    PreservedChains pc = select_preserved_chains(pair);
    for (EdgeId e : pc.fixed) m.fixed_zero[e] = 1;
    m.preserved = std::move(pc.chains);
  }
  return m;
}

std::string export_model(const HittingSetModel& model) {
  std::ostringstream out;
  auto terms = [&](auto&& vars) {
    int k = 0;
    for (int v : vars) {
      if (k) out << (k % 12 == 0 ? "\n   + " : " + ");
      out << 'x' << v;
      ++k;
    }
  };
  out << "\\ hitting-set model: " << model.num_vars << " variables, " << model.num_constraints()
      << " constraints\n";
  out << "Minimize\n obj:";
  std::vector<int> all(model.num_vars);
  std::iota(all.begin(), all.end(), 0);
  if (!all.empty()) {
    out << ' ';
    terms(all);
  }
  out << "\n";
  bool any_fixed = false;
  for (int v = 0; v < model.num_vars; ++v) any_fixed |= model.fixed_zero[v] || model.fixed_one[v];
  if (model.num_constraints() > 0 || any_fixed) {
    out << "Subject To\n";
    for (std::size_t i = 0; i < model.num_constraints(); ++i) {
      std::vector<int> vars;
      for (int v = 0; v < model.num_vars; ++v)
        if (model.row_has(i, v)) vars.push_back(v);
      out << " c" << i << ": ";
      terms(vars);
      out << " >= 1\n";
    }
    for (int v = 0; v < model.num_vars; ++v) {
      if (model.fixed_zero[v]) out << " fix" << v << ": x" << v << " = 0\n";
      if (model.fixed_one[v]) out << " fix" << v << ": x" << v << " = 1\n";
    }
  }
  out << "Binary\n";
  for (int v = 0; v < model.num_vars; ++v) out << " x" << v << (v % 16 == 15 ? "\n" : "");
  if (model.num_vars % 16 != 0) out << "\n";
  out << "End\n";
  return out.str();
}

std::string_view to_string(SolveStatus s) { return s == SolveStatus::Optimal ? "optimal" : "upper_bound_only"; }

namespace {

using Clock = std::chrono::steady_clock;

// Rows as packed bitsets with a fixed word count.
struct RowSet {
  int words;
  std::vector<std::uint64_t> data;
  std::size_t size() const { return data.size() / words; }
  const std::uint64_t* row(std::size_t i) const { return data.data() + i * words; }
};

int popcount(const std::uint64_t* r, int words) {
  int c = 0;
  for (int k = 0; k < words; ++k) c += std::popcount(r[k]);
  return c;
}

int first_bit(const std::uint64_t* r, int words) {
  for (int k = 0; k < words; ++k)
    if (r[k]) return k * 64 + std::countr_zero(r[k]);
  return -1;
}

// Drops duplicate rows and rows containing another row; survivors are sorted
// by size, then by words.
RowSet minimal_rows(const RowSet& in, int num_vars) {
  const int w = in.words;
  std::vector<std::size_t> order(in.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<int> pc(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) pc[i] = popcount(in.row(i), w);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (pc[a] != pc[b]) return pc[a] < pc[b];
    return std::lexicographical_compare(in.row(a), in.row(a) + w, in.row(b), in.row(b) + w);
  });
  RowSet out{w, {}};
  std::vector<std::vector<std::uint32_t>> by_first(num_vars);
  for (std::size_t idx : order) {
    const std::uint64_t* r = in.row(idx);
    bool subsumed = false;
    for (int k = 0; k < w && !subsumed; ++k) {
      for (std::uint64_t bits = r[k]; bits && !subsumed; bits &= bits - 1) {
        int v = k * 64 + std::countr_zero(bits);
        for (std::uint32_t s : by_first[v]) {
          const std::uint64_t* sr = out.row(s);
          bool sub = true;
          for (int j = 0; j < w; ++j)
            if (sr[j] & ~r[j]) {
              sub = false;
              break;
            }
          if (sub) {
            subsumed = true;
            break;
          }
        }
      }
    }
    if (subsumed) continue;
    by_first[first_bit(r, w)].push_back(static_cast<std::uint32_t>(out.size()));
    out.data.insert(out.data.end(), r, r + w);
  }
  return out;
}

// Removes variables whose rows are a subset of another variable's rows; on
// equal columns the lowest index survives. Returns true if anything changed.
bool drop_dominated(RowSet& rows, std::vector<char>& allowed) {
  const int w = rows.words;
  const int m = static_cast<int>(allowed.size());
  const std::size_t r = rows.size();
  if (r == 0) return false;
  const std::size_t cw = (r + 63) / 64;
  std::vector<std::uint64_t> col(static_cast<std::size_t>(m) * cw, 0);
  for (std::size_t i = 0; i < r; ++i)
    for (int k = 0; k < w; ++k)
      for (std::uint64_t bits = rows.row(i)[k]; bits; bits &= bits - 1) {
        int v = k * 64 + std::countr_zero(bits);
        col[v * cw + i / 64] |= std::uint64_t{1} << (i % 64);
      }
  std::vector<char> drop(m, 0);
  for (int u = 0; u < m; ++u) {
    if (!allowed[u]) continue;
    const std::uint64_t* cu = &col[u * cw];
    for (int v = 0; v < m && !drop[u]; ++v) {
      if (v == u || !allowed[v]) continue;
      const std::uint64_t* cv = &col[v * cw];
      bool subset = true, equal = true;
      for (std::size_t k = 0; k < cw; ++k) {
        if (cu[k] & ~cv[k]) {
          subset = false;
          break;
        }
        if (cu[k] != cv[k]) equal = false;
      }
      if (subset && (!equal || v < u)) drop[u] = 1;
    }
  }
  bool changed = false;
  std::vector<std::uint64_t> mask(w, ~std::uint64_t{0});
  for (int u = 0; u < m; ++u)
    if (drop[u]) {
      allowed[u] = 0;
      mask[u / 64] &= ~(std::uint64_t{1} << (u % 64));
      changed = true;
    }
  if (changed)
    for (std::size_t i = 0; i < r; ++i)
      for (int k = 0; k < w; ++k) rows.data[i * w + k] &= mask[k];
  return changed;
}

class BranchAndBound {
 public:
  BranchAndBound(RowSet rows, int num_vars, const ExactOptions& opt)
      : rows_(std::move(rows)), w_(rows_.words), m_(num_vars), opt_(opt), start_(Clock::now()) {
    hits_.assign(m_, 0);
  }

  void set_incumbent(int cost, std::vector<std::uint64_t> chosen) {
    best_ = cost;
    best_set_ = std::move(chosen);
  }

  // Cost offset is the number of variables already fixed to one.
  void run(const std::vector<std::uint64_t>& allowed) {
    std::vector<std::uint32_t> all(rows_.size());
    std::iota(all.begin(), all.end(), 0);
    std::vector<std::uint64_t> chosen(w_, 0);
    levels_.resize(m_ + 2);  // depth never exceeds the number of variables
    root_lb_ = packing_bound(all, allowed);
    if (proven()) return;
    dfs(0, 0, all, chosen, allowed);
  }

  int best() const { return best_; }
  const std::vector<std::uint64_t>& best_set() const { return best_set_; }
  long nodes() const { return nodes_; }
  bool aborted() const { return aborted_; }
  int root_lb() const { return root_lb_; }

 private:
  bool proven() const { return opt_.lower && best_ <= opt_.lower->get() - offset_; }

 public:
  int offset_ = 0;

 private:
  int packing_bound(const std::vector<std::uint32_t>& act, const std::vector<std::uint64_t>& free) const {
    std::vector<std::uint64_t> used(w_, 0);
    int lb = 0;
    for (std::uint32_t i : act) {
      const std::uint64_t* r = rows_.row(i);
      bool hit = false;
      for (int k = 0; k < w_; ++k)
        if (r[k] & free[k] & used[k]) {
          hit = true;
          break;
        }
      if (hit) continue;
      for (int k = 0; k < w_; ++k) used[k] |= r[k] & free[k];
      ++lb;
    }
    return lb;
  }

  bool out_of_budget() {
    if (opt_.node_limit > 0 && nodes_ >= opt_.node_limit) return true;
    if (opt_.time_cap_seconds > 0 && (nodes_ & 1023) == 0 &&
        std::chrono::duration<double>(Clock::now() - start_).count() > opt_.time_cap_seconds)
      return true;
    return false;
  }

  void dfs(int depth, int cost, const std::vector<std::uint32_t>& parent, std::vector<std::uint64_t> chosen,
           std::vector<std::uint64_t> free) {
    if (stop_) return;
    ++nodes_;
    if (out_of_budget()) {
      stop_ = aborted_ = true;
      return;
    }
    std::vector<std::uint32_t>& act = levels_[depth];
    act.clear();
    std::vector<std::uint64_t> unit(w_);
    const std::vector<std::uint32_t>* src = &parent;
    while (true) {
      std::fill(unit.begin(), unit.end(), 0);
      std::size_t out = 0;
      bool filtering_self = (src == &act);
      for (std::size_t idx = 0; idx < src->size(); ++idx) {
        std::uint32_t i = (*src)[idx];
        const std::uint64_t* r = rows_.row(i);
        bool sat = false;
        for (int k = 0; k < w_; ++k)
          if (r[k] & chosen[k]) {
            sat = true;
            break;
          }
        if (sat) continue;
        int cnt = 0, last_k = 0;
        for (int k = 0; k < w_; ++k) {
          std::uint64_t f = r[k] & free[k];
          if (f) {
            cnt += std::popcount(f);
            last_k = k;
          }
        }
        if (cnt == 0) return;  // infeasible branch
        if (cnt == 1) unit[last_k] |= r[last_k] & free[last_k];
        if (filtering_self)
          act[out++] = i;
        else
          act.push_back(i);
      }
      if (filtering_self) act.resize(out);
      int added = 0;
      for (int k = 0; k < w_; ++k) {
        added += std::popcount(unit[k]);
        chosen[k] |= unit[k];
        free[k] &= ~unit[k];
      }
      if (added == 0) break;
      cost += added;
      if (cost >= best_) return;
      src = &act;
    }
    if (act.empty()) {
      if (cost < best_) {
        best_ = cost;
        best_set_ = chosen;
        if (opt_.log) *opt_.log << "incumbent " << best_ + offset_ << " nodes " << nodes_ << '\n';
        if (proven()) stop_ = true;
      }
      return;
    }
    if (cost + packing_bound(act, free) >= best_) return;

    std::fill(hits_.begin(), hits_.end(), 0);
    for (std::uint32_t i : act) {
      const std::uint64_t* r = rows_.row(i);
      for (int k = 0; k < w_; ++k)
        for (std::uint64_t bits = r[k] & free[k]; bits; bits &= bits - 1) ++hits_[k * 64 + std::countr_zero(bits)];
    }
    int v = 0;
    for (int u = 1; u < m_; ++u)
      if (hits_[u] > hits_[v]) v = u;
    const std::uint64_t bit = std::uint64_t{1} << (v % 64);

    std::vector<std::uint64_t> c1 = chosen, f1 = free;
    c1[v / 64] |= bit;
    f1[v / 64] &= ~bit;
    if (cost + 1 < best_) dfs(depth + 1, cost + 1, levels_[depth], std::move(c1), f1);
    if (stop_) return;
    free[v / 64] &= ~bit;
    dfs(depth + 1, cost, levels_[depth], std::move(chosen), std::move(free));
  }

  RowSet rows_;
  int w_;
  int m_;
  const ExactOptions& opt_;
  Clock::time_point start_;
  std::vector<std::vector<std::uint32_t>> levels_;
  std::vector<long> hits_;
  int best_ = 0;
  std::vector<std::uint64_t> best_set_;
  long nodes_ = 0;
  bool stop_ = false;
  bool aborted_ = false;
  int root_lb_ = 0;
};

bool is_cover(const HittingSetModel& model, const std::vector<char>& cut) {
  for (std::size_t i = 0; i < model.num_constraints(); ++i) {
    bool hit = false;
    for (int v = 0; v < model.num_vars && !hit; ++v) hit = cut[v] && model.row_has(i, v);
    if (!hit) return false;
  }
  return true;
}

}  // namespace

ExactResult solve_exact(const HittingSetModel& model, const ExactOptions& options) {
  const int m = model.num_vars;
  const int w = model.words;
  if (static_cast<int>(model.fixed_zero.size()) != m || static_cast<int>(model.fixed_one.size()) != m)
    throw std::invalid_argument("model fixings do not match its variables");

  std::vector<std::uint64_t> one(w, 0), allowed_bits(w, 0);
  std::vector<char> allowed(m, 0);
  int offset = 0;
  for (int v = 0; v < m; ++v) {
    if (model.fixed_one[v]) {
      one[v / 64] |= std::uint64_t{1} << (v % 64);
      ++offset;
    } else if (!model.fixed_zero[v]) {
      allowed[v] = 1;
    }
  }
  // Rows left open by the fixed-one variables, restricted to free variables.
  RowSet raw{w, {}};
  for (std::size_t i = 0; i < model.num_constraints(); ++i) {
    auto r = model.row(i);
    bool hit = false, any = false;
    for (int k = 0; k < w; ++k) hit |= (r[k] & one[k]) != 0;
    if (hit) continue;
    for (int v = 0; v < m; ++v) any |= allowed[v] && model.row_has(i, v);
    if (!any) throw std::invalid_argument("constraint " + std::to_string(i) + " has no free variable");
    for (int k = 0; k < w; ++k) {
      std::uint64_t mask = 0;
      for (int b = 0; b < 64 && k * 64 + b < m; ++b)
        if (allowed[k * 64 + b]) mask |= std::uint64_t{1} << b;
      raw.data.push_back(r[k] & mask);
    }
  }
  RowSet rows = minimal_rows(raw, m);
  if (options.dominance) {
    while (drop_dominated(rows, allowed)) rows = minimal_rows(rows, m);
  }
  for (int v = 0; v < m; ++v)
    if (allowed[v]) allowed_bits[v / 64] |= std::uint64_t{1} << (v % 64);

  // Incumbent: the warm start if feasible, otherwise greedy.
  std::vector<EdgeId> warm = options.warm_start ? *options.warm_start : greedy_upper_bound(model).cut_set;
  std::vector<char> warm_mask(m, 0);
  for (EdgeId e : warm) {
    if (e < 0 || e >= m) throw std::invalid_argument("warm start edge out of range");
    warm_mask[e] = 1;
  }
  for (int v = 0; v < m; ++v)
    if (model.fixed_one[v]) warm_mask[v] = 1;
  if (!is_cover(model, warm_mask)) warm_mask = [&] {
      std::vector<char> g(m, 0);
      for (EdgeId e : greedy_upper_bound(model).cut_set) g[e] = 1;
      return g;
    }();
  std::vector<std::uint64_t> warm_bits(w, 0);
  int warm_cost = 0;
  for (int v = 0; v < m; ++v)
    if (warm_mask[v] && !model.fixed_one[v]) {
      warm_bits[v / 64] |= std::uint64_t{1} << (v % 64);
      ++warm_cost;
    }

  if (options.log)
    *options.log << "model variables " << m << " free " << std::count(allowed.begin(), allowed.end(), 1)
                 << " fixed_one " << offset << " rows " << model.num_constraints() << " reduced_rows " << rows.size()
                 << '\n'
                 << "warm_start " << warm_cost + offset << '\n';
  BranchAndBound bb(std::move(rows), m, options);
  bb.offset_ = offset;
  bb.set_incumbent(warm_cost, warm_bits);
  bb.run(allowed_bits);

  ExactResult res;
  res.nodes_explored = bb.nodes();
  res.objective = bb.best() + offset;
  for (int v = 0; v < m; ++v)
    if (model.fixed_one[v] || ((bb.best_set()[v / 64] >> (v % 64)) & 1)) res.cut_set.push_back(v);
  res.upper = res.objective;
  int ext = options.lower ? options.lower->get() : 0;
  if (bb.aborted()) {
    res.status = SolveStatus::UpperBoundOnly;
    res.lower = std::min(res.upper, std::max(ext, offset + bb.root_lb()));
  } else {
    res.lower = res.upper;
  }
  if (options.log)
    *options.log << "done " << to_string(res.status) << " nodes " << res.nodes_explored << " lower " << res.lower
                 << " upper " << res.upper << '\n';
  return res;
}

Partition extract_forest(const PhyloTree& tree, std::span<const EdgeId> cut_set) {
  const int nv = static_cast<int>(tree.num_vertices());
  std::vector<int> parent(nv);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::vector<char> cut(tree.num_edges(), 0);
  for (EdgeId e : cut_set) {
    if (e < 0 || e >= static_cast<EdgeId>(tree.num_edges())) throw std::invalid_argument("cut edge out of range");
    cut[e] = 1;
  }
  for (EdgeId e = 0; e < static_cast<EdgeId>(tree.num_edges()); ++e)
    if (!cut[e]) parent[find(tree.edge(e).u)] = find(tree.edge(e).v);
  std::vector<int> block_of(nv, -1);
  Partition out;
  for (Taxon x = 0; x < static_cast<Taxon>(tree.num_taxa()); ++x) {
    int r = find(x);
    if (block_of[r] < 0) {
      block_of[r] = static_cast<int>(out.size());
      out.emplace_back();
    }
    out[block_of[r]].push_back(x);
  }
  return out;
}

namespace {

void check_partition(std::size_t n, const Partition& forest) {
  std::vector<int> seen(n, 0);
  for (const auto& b : forest) {
    if (b.empty()) throw std::invalid_argument("forest has an empty block");
    for (Taxon x : b) {
      if (x < 0 || static_cast<std::size_t>(x) >= n) throw std::invalid_argument("forest names an unknown taxon");
      if (seen[x]++) throw std::invalid_argument("forest is not a partition: taxon repeated");
    }
  }
  for (std::size_t x = 0; x < n; ++x)
    if (!seen[x]) throw std::invalid_argument("forest is not a partition: taxon missing");
}

std::string block_string(const PhyloTree& t, const std::vector<Taxon>& b) {
  std::string s = "{";
  for (std::size_t i = 0; i < b.size(); ++i) s += (i ? "," : "") + t.label(b[i]);
  return s + "}";
}

}  // namespace

ForestCheck validate_forest(const TreePair& pair, const Partition& forest) {
  require_same_taxa(pair);
  check_partition(pair.first.num_taxa(), forest);
  ForestCheck res;
  auto fail = [&](const std::string& why) {
    res.ok = false;
    if (!res.report.empty()) res.report += "; ";
    res.report += why;
  };
  for (const auto& b : forest) {
    if (b.size() < 4) continue;  // at most one tree on three or fewer taxa
    if (!(restrict_taxa(pair.first, b) == restrict_taxa(pair.second, b)))
      fail("condition 1: block " + block_string(pair.first, b) + " restricts differently");
  }
  for (const PhyloTree* t : {&pair.first, &pair.second}) {
    std::vector<int> owner(t->num_vertices(), -1);
    for (std::size_t i = 0; i < forest.size(); ++i) {
      auto span = spanning_vertices(*t, forest[i]);
      for (std::size_t v = 0; v < span.size(); ++v) {
        if (!span[v]) continue;
        if (owner[v] >= 0) {
          fail(std::string("condition 2: blocks ") + block_string(*t, forest[owner[v]]) + " and " +
               block_string(*t, forest[i]) + " overlap in the " + (t == &pair.first ? "first" : "second") +
               " tree");
          break;
        }
        owner[v] = static_cast<int>(i);
      }
    }
  }
  return res;
}

std::vector<EdgeId> cut_set_from_forest(const PhyloTree& tree, const Partition& forest) {
  check_partition(tree.num_taxa(), forest);
  const int nv = static_cast<int>(tree.num_vertices());
  std::vector<int> block(nv, -1);
  for (std::size_t i = 0; i < forest.size(); ++i) {
    auto span = spanning_vertices(tree, forest[i]);
    for (int v = 0; v < nv; ++v) {
      if (!span[v]) continue;
      if (block[v] >= 0) throw std::invalid_argument("forest blocks overlap in the tree");
      block[v] = static_cast<int>(i);
    }
  }
  std::vector<EdgeId> cut;
  if (forest.size() <= 1) return cut;
  // Root inside block 0; every other block is entered through exactly one edge.
  const Vertex root = forest[0][0];
  std::vector<Vertex> par(nv, -1), queue{root};
  par[root] = root;
  for (std::size_t i = 0; i < queue.size(); ++i) {
    Vertex v = queue[i];
    for (Vertex w : tree.neighbors(v)) {
      if (par[w] != -1) continue;
      par[w] = v;
      queue.push_back(w);
      if (block[w] >= 0 && block[w] != block[v]) cut.push_back(tree.edge_between(v, w));
    }
  }
  std::sort(cut.begin(), cut.end());
  return cut;
}

Partition to_partition(const PhyloTree& tree, const LabelForest& forest) {
  Partition out;
  for (const auto& b : forest) {
    std::vector<Taxon> block;
    for (const auto& l : b) block.push_back(tree.taxon(l));
    std::sort(block.begin(), block.end());
    out.push_back(std::move(block));
  }
  std::sort(out.begin(), out.end());
  return out;
}

LabelForest to_labels(const PhyloTree& tree, const Partition& forest) {
  Partition sorted = forest;
  for (auto& b : sorted) std::sort(b.begin(), b.end());
  std::sort(sorted.begin(), sorted.end());
  LabelForest out;
  for (const auto& b : sorted) {
    std::vector<std::string> labels;
    for (Taxon x : b) labels.push_back(tree.label(x));
    out.push_back(std::move(labels));
  }
  return out;
}

SolveResult solve_reduced(const TreePair& pair, const SolverOptions& options) {
  require_same_taxa(pair);
  SolveResult res;
  res.instance = pair;
  const int n = static_cast<int>(pair.first.num_taxa());
  if (n < 4) {
    std::vector<Taxon> all(n);
    std::iota(all.begin(), all.end(), 0);
    res.forest = to_labels(pair.first, {all});
    res.num_vars = static_cast<int>(pair.first.num_edges());
    return res;
  }
  HittingSetModel model = build_model(pair, options.preserve_chains);
  res.num_vars = model.num_vars;
  res.num_fixed = model.num_fixed_zero();
  res.num_constraints = static_cast<long>(model.num_constraints());

  BoundCell cell(options.lower_hint);
  Rng rng(derive_seed(options.seed, {0x646d70}));
  BoundBudget budget{options.bound_samples, options.bound_time_cap_seconds, nullptr};
  GreedyResult greedy = greedy_upper_bound(model);
  ExactOptions eo;
  eo.lower = &cell;
  eo.warm_start = greedy.cut_set;
  eo.time_cap_seconds = options.time_cap_seconds;
  eo.node_limit = options.node_limit;
  eo.dominance = options.dominance;
  eo.log = options.log;
  if (options.log) *options.log << "greedy " << greedy.value << '\n';
  ExactResult exact;
  if (options.concurrent_bound && options.bound_samples > 0) {
    std::atomic<bool> stop{false};
    budget.stop = &stop;
    BoundReport rep;
    std::thread sampler([&] { rep = dmp_lower_bound(pair, budget, rng, &cell); });
    try {
      exact = solve_exact(model, eo);
    } catch (...) {
      stop = true;
      sampler.join();
      throw;
    }
    stop = true;
    sampler.join();
    res.dmp_lower_bound = rep.value;
  } else {
    if (options.bound_samples > 0) res.dmp_lower_bound = dmp_lower_bound(pair, budget, rng, &cell).value;
    if (options.log) *options.log << "dmp_lower_bound " << res.dmp_lower_bound << '\n';
    exact = solve_exact(model, eo);
  }
  res.distance = exact.objective;
  res.upper = exact.upper;
  res.lower = std::max(exact.lower, std::min(cell.get(), exact.upper));
  res.status = exact.status;
  if (res.lower == res.upper) res.status = SolveStatus::Optimal;
  res.nodes_explored = exact.nodes_explored;
  res.cut_set = exact.cut_set;
  res.forest = to_labels(pair.first, extract_forest(pair.first, exact.cut_set));
  return res;
}

SolveResult tbr_distance(const TreePair& pair, const SolverOptions& options) {
  require_same_taxa(pair);
  KernelResult k = kernelize(pair, options.ruleset);
  SolveResult res = options.use_clusters ? solve_with_clusters(k.reduced, options) : solve_reduced(k.reduced, options);
  res.parameter_reduction = k.parameter_reduction;
  res.distance += k.parameter_reduction;
  res.lower += k.parameter_reduction;
  res.upper += k.parameter_reduction;
  res.dmp_lower_bound += k.parameter_reduction;
  return res;
}

}  // namespace tbrkit
