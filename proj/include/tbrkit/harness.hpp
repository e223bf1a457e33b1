#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tbrkit/maf_solver.hpp"

namespace tbrkit {

inline constexpr int kSchemaVersion = 1;

struct PairManifest {
  int t = 0;
  int s = 0;
  int k = 0;
  std::uint64_t seed = 0;
  std::uint64_t tree_seed = 0;
  std::uint64_t walk_seed = 0;
};

struct GeneratedPair {
  TreePair pair;
  PairManifest manifest;
};

/// T = random_tree(t, s), T' = k random TBR moves away from T. Both draws use
/// their own substream of `seed`.
GeneratedPair generate_pair(int t, int s, int k, std::uint64_t seed);

struct ExperimentConfig {
  std::vector<int> taxa_grid{20, 40, 60};
  std::vector<int> skew_grid{50, 90};
  std::vector<int> moves_grid{3, 5, 8};
  int replicates = 3;
  std::uint64_t seed = 1;
  long bound_samples = 10000;
  double time_cap_seconds = 0;  // per solve; 0 keeps runs reproducible
  long node_limit = 20'000'000;  // per solve
  bool preserve_chains = true;
  bool use_clusters = false;
  int jobs = 1;
};

struct StatRow {
  int t = 0, s = 0, k = 0, replicate = 0;
  std::uint64_t seed = 0;
  int s_taxa = 0;
  int sc_taxa = 0;
  int scn_taxa = 0;
  int param_reductions = 0;
  int dmp_lb = 0;
  std::optional<int> d_tbr_exact;
  std::string theta_source;  // "exact" or "mp_lower_bound"
  std::optional<double> f_k;
  std::string solve_status;
  long nodes = 0;
  // Wall-clock seconds; kept out of the main table so it stays reproducible.
  double kernel_seconds = 0, bound_seconds = 0, solve_seconds = 0;
};

/// Every stage on a given pair; t, s, k and replicate are left for the caller.
/// `seed` drives the bound sampling and the solver.
StatRow analyze_pair(const TreePair& pair, std::uint64_t seed, const ExperimentConfig& config);

/// One row of the grid, all stages.
StatRow run_cell(int t, int s, int k, int replicate, const ExperimentConfig& config);

/// Runs the whole grid. Rows are written to `csv` (and timings to `timing`)
/// in grid order as soon as every earlier row is done.
std::vector<StatRow> run_experiment(const ExperimentConfig& config, std::ostream* csv = nullptr,
                                    std::ostream* timing = nullptr);

std::string csv_header();
std::string to_csv(const StatRow& row);
std::string timing_header();
std::string to_timing_csv(const StatRow& row);
std::vector<StatRow> read_csv(std::istream& in);

struct TaxaShare {
  double subtree = 0, subtree_chain = 0, all = 0;  // mean percentage of t
  int rows = 0;
};

struct Summary {
  std::map<std::pair<int, int>, TaxaShare> remaining;  // by (t, k)
  std::map<int, int> reduction_histogram;               // parameter reductions -> rows
  int rows = 0;
  int exact_rows = 0;
  int bound_equal = 0;   // dmp_lb == exact
  int bound_below = 0;   // dmp_lb < exact
  int max_gap = 0;
  std::optional<double> max_f_k;
  int kernel_bound_violations = 0;  // exact d >= 2 with scn > 11d - 9
};

Summary compute_stats(const std::vector<StatRow>& rows);
std::string format_summary(const Summary& s);

}  // namespace tbrkit
