// tbrkit command line. Trees are read and written as Newick, one per line;
// lines starting with '#' carry manifests, traces and logs and are skipped
// when the file is read back.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tbrkit/bounds.hpp"
#include "tbrkit/harness.hpp"
#include "tbrkit/kernelizer.hpp"
#include "tbrkit/maf_solver.hpp"
#include "tbrkit/newick.hpp"
#include "tbrkit/oracle.hpp"
#include "tbrkit/tbr.hpp"

using namespace tbrkit;

namespace {

struct Globals {
  std::uint64_t seed = 1;
  std::string ruleset = "all";
  bool preserve_chains = true;
  bool clusters = false;
  long budget_samples = 10000;
  double time_cap = -1;  // negative: the subcommand's default
  std::string out;
};

class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_ = std::make_unique<std::ofstream>(path);
    if (!*file_) throw std::runtime_error("cannot write " + path);
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

std::string join(const std::vector<std::string>& v, const char* sep) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? sep : "") + v[i];
  return s;
}

std::string forest_text(const LabelForest& f) {
  std::vector<std::string> blocks;
  for (const auto& b : f) blocks.push_back("{" + join(b, ",") + "}");
  return join(blocks, " ");
}

SolverOptions solver_options(const Globals& g, double default_cap) {
  SolverOptions o;
  o.ruleset = parse_ruleset(g.ruleset);
  o.preserve_chains = g.preserve_chains;
  o.use_clusters = g.clusters;
  o.bound_samples = g.budget_samples;
  o.time_cap_seconds = g.time_cap < 0 ? default_cap : g.time_cap;
  o.seed = g.seed;
  return o;
}

std::vector<int> parse_grid(const std::string& text, const char* what) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw CLI::ValidationError(what, "expected a comma-separated list of integers");
    }
  }
  if (out.empty()) throw CLI::ValidationError(what, "empty list");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kernelization, bounds and exact TBR distance for pairs of unrooted binary trees"};
  app.require_subcommand(1);
  Globals g;
  std::map<std::string, bool> on_off{{"on", true}, {"off", false}};
  app.add_option("--seed", g.seed, "Root seed")->capture_default_str();
  app.add_option("--ruleset", g.ruleset, "Reductions to apply")
      ->check(CLI::IsMember({"none", "subtree", "subtree-chain", "all"}))
      ->capture_default_str();
  app.add_option("--preserve-chains", g.preserve_chains, "Fix edges of preserved common chains (on|off)")
      ->transform(CLI::CheckedTransformer(on_off))
      ->default_str("on");
  app.add_option("--clusters", g.clusters, "Split on common clusters (on|off)")
      ->transform(CLI::CheckedTransformer(on_off))
      ->default_str("off");
  app.add_option("--budget-samples", g.budget_samples, "d_MP samples")->check(CLI::NonNegativeNumber)->capture_default_str();
  app.add_option("--time-cap", g.time_cap, "Seconds per exact solve (0 for none)")->check(CLI::NonNegativeNumber);
  app.add_option("--out", g.out, "Output file (default stdout)");
  app.fallthrough();

  int t = 20, s = 50, k = 3;
  auto* generate = app.add_subcommand("generate", "Random tree and a random TBR walk away from it");
  generate->add_option("--taxa", t, "Number of taxa")->check(CLI::Range(4, 1 << 20))->capture_default_str();
  generate->add_option("--skew", s, "Skew in percent")->check(CLI::Range(0, 100))->capture_default_str();
  generate->add_option("--moves", k, "Number of random TBR moves")->check(CLI::NonNegativeNumber)->capture_default_str();

  std::string input;
  auto* kern = app.add_subcommand("kernelize", "Reduce a pair and print the reduced trees and the trace");
  kern->add_option("pair", input, "File with two Newick trees")->required()->check(CLI::ExistingFile);

  auto* bound = app.add_subcommand("bound", "Sampled d_MP lower bound");
  bound->add_option("pair", input, "File with two Newick trees")->required()->check(CLI::ExistingFile);

  auto* solve = app.add_subcommand("solve", "TBR distance and a maximum agreement forest");
  solve->add_option("pair", input, "File with two Newick trees")->required()->check(CLI::ExistingFile);
  long node_limit = 0;
  solve->add_option("--node-limit", node_limit, "Branch-and-bound node limit (0 for none)")->check(CLI::NonNegativeNumber);
  std::string log_path;
  solve->add_option("--log", log_path, "Write the solver log here ('-' for stderr)");

  auto* oracle = app.add_subcommand("oracle", "Exhaustive TBR distance for small pairs");
  oracle->add_option("pair", input, "File with two Newick trees")->required()->check(CLI::ExistingFile);
  int max_taxa = 10;
  oracle->add_option("--max-taxa", max_taxa, "Refuse larger pairs")->capture_default_str();

  ExperimentConfig cfg;
  std::string taxa = "20,40,60", skews = "50,90", moves = "3,5,8";
  auto* experiment = app.add_subcommand("experiment", "Run the grid and write one CSV row per pair");
  experiment->add_option("--taxa", taxa, "Grid of t")->capture_default_str();
  experiment->add_option("--skews", skews, "Grid of s")->capture_default_str();
  experiment->add_option("--moves", moves, "Grid of k")->capture_default_str();
  experiment->add_option("--replicates", cfg.replicates, "Pairs per cell")->check(CLI::PositiveNumber)->capture_default_str();
  experiment->add_option("--jobs", cfg.jobs, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  experiment->add_option("--node-limit", cfg.node_limit, "Node limit per solve (0 for none)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();

  std::string csv_in;
  auto* stats = app.add_subcommand("stats", "Summarize an experiment CSV");
  stats->add_option("csv", csv_in, "Experiment CSV")->required()->check(CLI::ExistingFile);

  auto* export_lp = app.add_subcommand("export-lp", "Write the hitting-set model of the reduced pair as LP text");
  export_lp->add_option("pair", input, "File with two Newick trees")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    Output out(g.out);
    std::ostream& os = out.stream();
    const Ruleset ruleset = parse_ruleset(g.ruleset);

    if (*generate) {
      GeneratedPair p = generate_pair(t, s, k, g.seed);
      os << "# t=" << t << " s=" << s << " k=" << k << " seed=" << p.manifest.seed
         << " tree_seed=" << p.manifest.tree_seed << " walk_seed=" << p.manifest.walk_seed << "\n";
      os << write_newick(p.pair.first) << "\n" << write_newick(p.pair.second) << "\n";
    } else if (*kern) {
      TreePair pair = read_tree_pair(input);
      KernelResult r = kernelize(pair, ruleset);
      os << "# ruleset=" << to_string(ruleset) << " taxa=" << pair.first.num_taxa() << "->"
         << r.reduced.first.num_taxa() << " parameter_reduction=" << r.parameter_reduction << "\n";
      for (const auto& step : r.trace) os << "# " << format_step(step) << "\n";
      os << write_newick(r.reduced.first) << "\n" << write_newick(r.reduced.second) << "\n";
    } else if (*bound) {
      TreePair pair = read_tree_pair(input);
      Rng rng(g.seed);
      BoundBudget budget{g.budget_samples, g.time_cap < 0 ? 0 : g.time_cap, nullptr};
      BoundReport r = dmp_lower_bound(pair, budget, rng);
      os << "bound " << r.value << "\nsamples " << r.samples_taken << "\n";
      if (r.best_character)
        os << "character " << r.best_character->to_string(r.best_source == 0 ? pair.first : pair.second)
           << " (drawn for tree " << r.best_source + 1 << ")\n";
    } else if (*solve) {
      TreePair pair = read_tree_pair(input);
      SolverOptions opt = solver_options(g, 60);
      opt.node_limit = node_limit;
      std::ofstream log_file;
      if (log_path == "-") {
        opt.log = &std::cerr;
      } else if (!log_path.empty()) {
        log_file.open(log_path);
        if (!log_file) throw std::runtime_error("cannot write " + log_path);
        opt.log = &log_file;
      }
      SolveResult r = tbr_distance(pair, opt);
      os << "distance " << r.distance << "\nstatus " << to_string(r.status) << "\nlower " << r.lower << "\nupper "
         << r.upper << "\nparameter_reduction " << r.parameter_reduction << "\ndmp_lower_bound " << r.dmp_lower_bound
         << "\nnodes " << r.nodes_explored << "\nvariables " << r.num_vars << " fixed " << r.num_fixed
         << " constraints " << r.num_constraints << "\nreduced_taxa " << r.instance.first.num_taxa()
         << "\nforest " << forest_text(r.forest) << "\n";
    } else if (*oracle) {
      TreePair pair = read_tree_pair(input);
      OracleResult r = brute_force_tbr(pair, max_taxa);
      os << "distance " << r.distance << "\ncut_sets_tried " << r.cut_sets_tried << "\nforest "
         << forest_text(to_labels(pair.first, r.forest)) << "\n";
    } else if (*experiment) {
      cfg.taxa_grid = parse_grid(taxa, "--taxa");
      cfg.skew_grid = parse_grid(skews, "--skews");
      cfg.moves_grid = parse_grid(moves, "--moves");
      cfg.seed = g.seed;
      cfg.bound_samples = g.budget_samples;
      cfg.time_cap_seconds = g.time_cap < 0 ? 0 : g.time_cap;
      cfg.preserve_chains = g.preserve_chains;
      cfg.use_clusters = g.clusters;
      std::unique_ptr<std::ofstream> timing;
      if (!g.out.empty() && g.out != "-") {
        timing = std::make_unique<std::ofstream>(g.out + ".timing.csv");
        if (!*timing) throw std::runtime_error("cannot write " + g.out + ".timing.csv");
      }
      run_experiment(cfg, &os, timing.get());
    } else if (*stats) {
      std::ifstream in(csv_in);
      os << format_summary(compute_stats(read_csv(in)));
    } else if (*export_lp) {
      TreePair pair = read_tree_pair(input);
      KernelResult r = kernelize(pair, ruleset);
      os << export_model(build_model(r.reduced, g.preserve_chains));
    }
    os.flush();
    if (!os) throw std::runtime_error("write failed");
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
