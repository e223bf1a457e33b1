#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "tbrkit/phylo_tree.hpp"

namespace tbrkit {

class NewickError : public TreeError {
 public:
  NewickError(const std::string& what, std::size_t position)
      : TreeError(what + " at position " + std::to_string(position)), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// Parses one ';'-terminated tree. A bifurcating root is suppressed; branch
/// lengths and internal labels are read and dropped.
PhyloTree parse_newick(std::string_view text);

/// Canonical form: trifurcating at the parent of the smallest taxon, child
/// subtrees ordered by their smallest taxon.
std::string write_newick(const PhyloTree& tree);

/// One tree per non-empty line; lines starting with '#' are skipped.
std::vector<PhyloTree> read_newick_file(const std::filesystem::path& path);

/// First two trees of a file, checked to share a taxon set.
TreePair read_tree_pair(const std::filesystem::path& path);

bool is_valid_label(std::string_view label);

}  // namespace tbrkit
