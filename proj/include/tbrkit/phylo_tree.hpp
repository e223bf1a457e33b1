#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tbrkit {

using Vertex = int;
using EdgeId = int;

/// Position of a taxon in a tree's sorted label set. Two trees on the same
/// taxon set agree on taxon indices, which is what lets pair algorithms work
/// on plain integers.
using Taxon = int;

struct Edge {
  Vertex u;  // endpoint on the side of taxon 0
  Vertex v;
  friend bool operator==(const Edge&, const Edge&) = default;
};

class TreeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Unrooted binary phylogenetic tree stored in canonical form.
///
/// Leaves are vertices 0..n-1 in label order. Internal vertices are numbered
/// in preorder from leaf 0, visiting child subtrees by their smallest taxon.
/// Edge i < n is the pendant edge of taxon i (for n >= 3) and the edge above
/// internal vertex v > n has id v - 1. Isomorphic trees with identical labels
/// therefore compare equal.
class PhyloTree {
 public:
  /// Builds a tree from any tree-shaped graph. Vertices with an empty label
  /// are unlabeled: unlabeled leaves are pruned and unlabeled degree-2
  /// vertices are suppressed. What remains must have labeled leaves and
  /// unlabeled degree-3 internal vertices.
  static PhyloTree from_graph(std::span<const std::string> vertex_labels,
                              std::span<const std::pair<Vertex, Vertex>> edges);

  std::size_t num_taxa() const { return labels_.size(); }
  std::size_t num_vertices() const { return deg_.size(); }
  std::size_t num_edges() const { return edges_.size(); }

  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label(Taxon x) const { return labels_.at(x); }
  std::optional<Taxon> find_taxon(std::string_view label) const;
  Taxon taxon(std::string_view label) const;

  bool is_leaf(Vertex v) const { return v < static_cast<Vertex>(labels_.size()); }
  int degree(Vertex v) const { return deg_[v]; }
  std::span<const Vertex> neighbors(Vertex v) const {
    return {adj_[v].data(), static_cast<std::size_t>(deg_[v])};
  }
  std::span<const EdgeId> incident_edges(Vertex v) const {
    return {inc_[v].data(), static_cast<std::size_t>(deg_[v])};
  }
  bool adjacent(Vertex a, Vertex b) const { return edge_between(a, b) >= 0; }
  EdgeId edge_between(Vertex a, Vertex b) const;

  const Edge& edge(EdgeId e) const { return edges_.at(e); }
  const std::vector<Edge>& edges() const { return edges_; }

  /// The unique neighbour of a leaf. Requires at least two taxa.
  Vertex parent(Taxon x) const;
  EdgeId pendant_edge(Taxon x) const;
  bool is_cherry(Taxon a, Taxon b) const;
  /// Partner of x in a cherry, if x is in one.
  std::optional<Taxon> cherry_partner(Taxon x) const;

  friend bool operator==(const PhyloTree&, const PhyloTree&) = default;

 private:
  std::vector<std::string> labels_;
  std::vector<std::array<Vertex, 3>> adj_;
  std::vector<std::array<EdgeId, 3>> inc_;
  std::vector<std::uint8_t> deg_;
  std::vector<Edge> edges_;
};

/// Two trees over the same taxon set.
struct TreePair {
  PhyloTree first;
  PhyloTree second;
};

/// Throws TreeError unless both trees carry the same labels.
void require_same_taxa(const TreePair& pair);

}  // namespace tbrkit
