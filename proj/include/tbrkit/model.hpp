#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tbrkit/chains.hpp"
#include "tbrkit/phylo_tree.hpp"
#include "tbrkit/tree_ops.hpp"

namespace tbrkit {

/// Hitting-set form of the agreement-forest ILP: one binary variable per edge
/// of the designated tree, one cover constraint per conflicting quartet.
struct HittingSetModel {
  PhyloTree tree;  // designated tree; variable i is edge i of it
  int num_vars = 0;
  int words = 0;                     // 64-bit words per constraint row
  std::vector<std::uint64_t> rows;   // constraint i occupies words [i*words, (i+1)*words)
  std::vector<Quartet> quartets;     // topology in the designated tree, per row
  std::vector<char> fixed_zero;      // per variable
  std::vector<char> fixed_one;       // per variable
  std::vector<ChainDescriptor> preserved;

  std::size_t num_constraints() const { return quartets.size(); }
  std::span<const std::uint64_t> row(std::size_t i) const {
    return {rows.data() + i * words, static_cast<std::size_t>(words)};
  }
  bool row_has(std::size_t i, int var) const { return (rows[i * words + var / 64] >> (var % 64)) & 1; }
  int num_fixed_zero() const;
  int num_free() const;
};

}  // namespace tbrkit
