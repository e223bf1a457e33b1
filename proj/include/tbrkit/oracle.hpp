#pragma once

#include "tbrkit/maf_solver.hpp"

namespace tbrkit {

struct OracleResult {
  int distance = 0;
  Partition forest;
  long cut_sets_tried = 0;
};

/// Exhaustive search over cut sets of the first tree by increasing size; the
/// first one whose components form an agreement forest is a maximum one.
/// Throws std::invalid_argument above `max_taxa` taxa.
OracleResult brute_force_tbr(const TreePair& pair, int max_taxa = 10);

}  // namespace tbrkit
