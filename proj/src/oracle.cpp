#include "tbrkit/oracle.hpp"

#include <stdexcept>

namespace tbrkit {

OracleResult brute_force_tbr(const TreePair& pair, int max_taxa) {
  require_same_taxa(pair);
  const int n = static_cast<int>(pair.first.num_taxa());
  if (n > max_taxa)
    throw std::invalid_argument("oracle limited to " + std::to_string(max_taxa) + " taxa, got " + std::to_string(n));
  OracleResult res;
  const int m = static_cast<int>(pair.first.num_edges());
  for (int size = 0; size <= m; ++size) {
    // Lexicographic walk over size-element subsets of 0..m-1.
    std::vector<EdgeId> cut(size);
    for (int i = 0; i < size; ++i) cut[i] = i;
    while (true) {
      ++res.cut_sets_tried;
      Partition f = extract_forest(pair.first, cut);
      if (validate_forest(pair, f).ok) {
        res.distance = static_cast<int>(f.size()) - 1;
        res.forest = std::move(f);
        return res;
      }
      int i = size - 1;
      while (i >= 0 && cut[i] == m - size + i) --i;
      if (i < 0) break;
      ++cut[i];
      for (int j = i + 1; j < size; ++j) cut[j] = cut[j - 1] + 1;
    }
  }
  throw std::logic_error("no agreement forest found");
}

}  // namespace tbrkit
