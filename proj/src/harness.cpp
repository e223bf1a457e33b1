#include "tbrkit/harness.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <istream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "tbrkit/cluster.hpp"
#include "tbrkit/kernelizer.hpp"
#include "tbrkit/tbr.hpp"

namespace tbrkit {

GeneratedPair generate_pair(int t, int s, int k, std::uint64_t seed) {
  if (t < 4) throw std::invalid_argument("generate_pair needs t >= 4");
  if (s < 0 || s > 100) throw std::invalid_argument("skew must lie in [0, 100]");
  if (k < 0) throw std::invalid_argument("move count must be nonnegative");
  GeneratedPair g;
  g.manifest = {t, s, k, seed, derive_seed(seed, {1}), derive_seed(seed, {2})};
  Rng tree_rng(g.manifest.tree_seed);
  PhyloTree tree = random_tree(t, s, tree_rng);
  Rng walk_rng(g.manifest.walk_seed);
  PhyloTree moved = random_tbr_walk(tree, k, walk_rng);
  g.pair = {std::move(tree), std::move(moved)};
  return g;
}

namespace {

double since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

StatRow analyze_pair(const TreePair& pair, std::uint64_t seed, const ExperimentConfig& config) {
  StatRow row;
  row.t = static_cast<int>(pair.first.num_taxa());
  row.seed = seed;
  auto start = std::chrono::steady_clock::now();
  KernelResult sub = kernelize(pair, Ruleset::SubtreeOnly);
  KernelResult chain = kernelize(sub.reduced, Ruleset::SubtreeChain);
  KernelResult all = kernelize(chain.reduced, Ruleset::AllSeven);
  row.kernel_seconds = since(start);
  row.s_taxa = static_cast<int>(sub.reduced.first.num_taxa());
  row.sc_taxa = static_cast<int>(chain.reduced.first.num_taxa());
  row.scn_taxa = static_cast<int>(all.reduced.first.num_taxa());
  row.param_reductions = all.parameter_reduction;

  // The subtree reduction keeps d_MP, so the bound is sampled on that pair.
  start = std::chrono::steady_clock::now();
  Rng rng(derive_seed(row.seed, {3}));
  row.dmp_lb = dmp_lower_bound(sub.reduced, {config.bound_samples, 0, nullptr}, rng).value;
  row.bound_seconds = since(start);

  start = std::chrono::steady_clock::now();
  SolverOptions opt;
  opt.preserve_chains = config.preserve_chains;
  opt.use_clusters = config.use_clusters;
  opt.bound_samples = config.bound_samples;
  opt.time_cap_seconds = config.time_cap_seconds;
  opt.node_limit = config.node_limit;
  opt.seed = derive_seed(row.seed, {4});
  opt.lower_hint = std::max(0, row.dmp_lb - all.parameter_reduction);
  SolveResult r = opt.use_clusters ? solve_with_clusters(all.reduced, opt) : solve_reduced(all.reduced, opt);
  row.solve_seconds = since(start);
  row.nodes = r.nodes_explored;
  row.solve_status = std::string(to_string(r.status));
  if (r.status == SolveStatus::Optimal) row.d_tbr_exact = r.distance + all.parameter_reduction;

  int theta = row.d_tbr_exact ? *row.d_tbr_exact : row.dmp_lb;
  row.theta_source = row.d_tbr_exact ? "exact" : "mp_lower_bound";
  if (theta > 0) row.f_k = static_cast<double>(row.scn_taxa) / theta;
  return row;
}

StatRow run_cell(int t, int s, int k, int replicate, const ExperimentConfig& config) {
  const std::uint64_t seed =
      derive_seed(config.seed, {static_cast<std::uint64_t>(t), static_cast<std::uint64_t>(s),
                                static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(replicate)});
  StatRow row = analyze_pair(generate_pair(t, s, k, seed).pair, seed, config);
  row.s = s;
  row.k = k;
  row.replicate = replicate;
  return row;
}

std::vector<StatRow> run_experiment(const ExperimentConfig& config, std::ostream* csv, std::ostream* timing) {
  if (config.taxa_grid.empty() || config.skew_grid.empty() || config.moves_grid.empty())
    throw std::invalid_argument("experiment grids must be nonempty");
  if (config.replicates < 1) throw std::invalid_argument("need at least one replicate");
  struct Cell {
    int t, s, k, r;
  };
  std::vector<Cell> cells;
  for (int t : config.taxa_grid)
    for (int s : config.skew_grid)
      for (int k : config.moves_grid)
        for (int r = 0; r < config.replicates; ++r) cells.push_back({t, s, k, r});

  std::vector<std::optional<StatRow>> rows(cells.size());
  std::mutex mu;
  std::size_t next_out = 0;
  std::atomic<std::size_t> next_cell{0};
  std::exception_ptr error;
  if (csv) *csv << csv_header() << '\n' << std::flush;
  if (timing) *timing << timing_header() << '\n' << std::flush;

  auto worker = [&] {
    while (true) {
      std::size_t i = next_cell++;
      if (i >= cells.size()) return;
      StatRow row;
      try {
        row = run_cell(cells[i].t, cells[i].s, cells[i].k, cells[i].r, config);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!error) error = std::current_exception();
        next_cell = cells.size();
        return;
      }
      std::lock_guard lock(mu);
      rows[i] = std::move(row);
      while (next_out < rows.size() && rows[next_out]) {
        if (csv) *csv << to_csv(*rows[next_out]) << '\n' << std::flush;
        if (timing) *timing << to_timing_csv(*rows[next_out]) << '\n' << std::flush;
        ++next_out;
      }
    }
  };
  const int jobs = std::max(1, config.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);
  std::vector<StatRow> out;
  for (auto& r : rows) out.push_back(std::move(*r));
  return out;
}

std::string csv_header() {
  return "schema_version,t,s,k,replicate,seed,s_taxa,sc_taxa,scn_taxa,param_reductions,dmp_lb,"
         "d_tbr_exact,theta_source,f_k,solve_status,nodes";
}

std::string to_csv(const StatRow& r) {
  std::ostringstream o;
  o << kSchemaVersion << ',' << r.t << ',' << r.s << ',' << r.k << ',' << r.replicate << ',' << r.seed << ','
    << r.s_taxa << ',' << r.sc_taxa << ',' << r.scn_taxa << ',' << r.param_reductions << ',' << r.dmp_lb << ',';
  if (r.d_tbr_exact) o << *r.d_tbr_exact;
  o << ',' << r.theta_source << ',';
  if (r.f_k) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", *r.f_k);
    o << buf;
  }
  o << ',' << r.solve_status << ',' << r.nodes;
  return o.str();
}

std::string timing_header() { return "t,s,k,replicate,kernel_seconds,bound_seconds,solve_seconds"; }

std::string to_timing_csv(const StatRow& r) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%d,%d,%d,%d,%.3f,%.3f,%.3f", r.t, r.s, r.k, r.replicate, r.kernel_seconds,
                r.bound_seconds, r.solve_seconds);
  return buf;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out(1);
  for (char c : line) {
    if (c == ',')
      out.emplace_back();
    else if (c != '\r')
      out.back() += c;
  }
  return out;
}

}  // namespace

std::vector<StatRow> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty CSV");
  auto header = split_line(line);
  if (header != split_line(csv_header())) throw std::runtime_error("unexpected CSV header");
  std::vector<StatRow> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    auto f = split_line(line);
    if (f.size() != header.size()) throw std::runtime_error("CSV line " + std::to_string(lineno) + ": wrong field count");
    try {
      if (std::stoi(f[0]) != kSchemaVersion) throw std::runtime_error("unsupported schema version " + f[0]);
      StatRow r;
      r.t = std::stoi(f[1]);
      r.s = std::stoi(f[2]);
      r.k = std::stoi(f[3]);
      r.replicate = std::stoi(f[4]);
      r.seed = std::stoull(f[5]);
      r.s_taxa = std::stoi(f[6]);
      r.sc_taxa = std::stoi(f[7]);
      r.scn_taxa = std::stoi(f[8]);
      r.param_reductions = std::stoi(f[9]);
      r.dmp_lb = std::stoi(f[10]);
      if (!f[11].empty()) r.d_tbr_exact = std::stoi(f[11]);
      r.theta_source = f[12];
      if (!f[13].empty()) r.f_k = std::stod(f[13]);
      r.solve_status = f[14];
      r.nodes = std::stol(f[15]);
      rows.push_back(std::move(r));
    } catch (const std::logic_error&) {
      throw std::runtime_error("CSV line " + std::to_string(lineno) + ": malformed field");
    }
  }
  return rows;
}

Summary compute_stats(const std::vector<StatRow>& rows) {
  if (rows.empty()) throw std::invalid_argument("no rows to summarize");
  Summary s;
  s.rows = static_cast<int>(rows.size());
  for (const auto& r : rows) {
    TaxaShare& share = s.remaining[{r.t, r.k}];
    share.subtree += 100.0 * r.s_taxa / r.t;
    share.subtree_chain += 100.0 * r.sc_taxa / r.t;
    share.all += 100.0 * r.scn_taxa / r.t;
    ++share.rows;
    ++s.reduction_histogram[r.param_reductions];
    if (r.f_k && (!s.max_f_k || *r.f_k > *s.max_f_k)) s.max_f_k = r.f_k;
    if (!r.d_tbr_exact) continue;
    ++s.exact_rows;
    int d = *r.d_tbr_exact;
    if (r.dmp_lb == d) ++s.bound_equal;
    if (r.dmp_lb < d) ++s.bound_below;
    s.max_gap = std::max(s.max_gap, d - r.dmp_lb);
    if (d >= 2 && r.scn_taxa > 11 * d - 9) ++s.kernel_bound_violations;
  }
  for (auto& [key, share] : s.remaining) {
    share.subtree /= share.rows;
    share.subtree_chain /= share.rows;
    share.all /= share.rows;
  }
  return s;
}

std::string format_summary(const Summary& s) {
  std::ostringstream o;
  char buf[160];
  o << "rows " << s.rows << ", exact " << s.exact_rows << "\n";
  o << "remaining taxa (% of t): t k subtree subtree+chain all\n";
  for (const auto& [key, share] : s.remaining) {
    std::snprintf(buf, sizeof buf, "  %d %d %.1f %.1f %.1f\n", key.first, key.second, share.subtree,
                  share.subtree_chain, share.all);
    o << buf;
  }
  o << "parameter reductions: ";
  bool first = true;
  for (const auto& [count, n] : s.reduction_histogram) {
    o << (first ? "" : ", ") << count << ":" << n;
    first = false;
  }
  o << "\n";
  if (s.exact_rows > 0) {
    std::snprintf(buf, sizeof buf, "d_MP equal to exact: %d of %d (%.1f%%), below: %d, max gap %d\n", s.bound_equal,
                  s.exact_rows, 100.0 * s.bound_equal / s.exact_rows, s.bound_below, s.max_gap);
    o << buf;
  }
  if (s.max_f_k) {
    std::snprintf(buf, sizeof buf, "max f(k): %.4f\n", *s.max_f_k);
    o << buf;
  }
  o << "kernel size bound violations: " << s.kernel_bound_violations << "\n";
  return o.str();
}

}  // namespace tbrkit
