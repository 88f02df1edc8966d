#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "glnn/tensor.hpp"

namespace glnn {

using NodeId = std::size_t;
using Label = int;
using Edge = std::pair<NodeId, NodeId>;

/// Immutable node-classification graph: symmetric CSR adjacency without
/// self-loops, a dense N x D feature matrix and one class id per node.
///
/// Copies are cheap; adjacency, features and labels are shared. A graph built
/// with `features_only` has no adjacency at all and throws
/// AdjacencyUnavailableError from every structural accessor, which is how
/// graph-free inference paths are checked.
class Graph {
 public:
  Graph() = default;

  /// Builds the CSR from an undirected edge list. Self-loops and duplicate
  /// edges (in either orientation) are dropped.
  static Graph from_edges(std::size_t num_nodes, std::span<const Edge> edges,
                          Tensor features, std::vector<Label> labels,
                          std::size_t num_classes);

  /// Adopts an existing CSR after validating every invariant.
  static Graph from_csr(std::vector<std::size_t> row_ptr, std::vector<NodeId> col_idx,
                        Tensor features, std::vector<Label> labels, std::size_t num_classes);

  static Graph features_only(Tensor features, std::vector<Label> labels,
                             std::size_t num_classes);

  std::size_t num_nodes() const noexcept { return num_nodes_; }
  std::size_t num_classes() const noexcept { return num_classes_; }
  std::size_t feature_dim() const noexcept { return features_ ? features_->cols() : 0; }
  /// Undirected edge count |E| (col_idx holds 2|E| entries).
  std::size_t num_edges() const;

  bool has_adjacency() const noexcept { return static_cast<bool>(adj_); }
  std::span<const std::size_t> row_ptr() const;
  std::span<const NodeId> col_idx() const;
  std::span<const NodeId> neighbors(NodeId v) const;
  std::size_t degree(NodeId v) const;
  std::size_t max_degree() const;

  const Tensor& features() const;
  std::span<const Label> labels() const;

  /// Same topology and labels, different features.
  Graph with_features(Tensor features) const;
  /// Same topology and features, different labels.
  Graph with_labels(std::vector<Label> labels) const;

 private:
  struct Adjacency {
    std::vector<std::size_t> row_ptr;
    std::vector<NodeId> col_idx;
  };

  void validate_payload() const;
  const Adjacency& adj() const;

  std::size_t num_nodes_ = 0;
  std::size_t num_classes_ = 0;
  std::shared_ptr<const Adjacency> adj_;
  std::shared_ptr<const Tensor> features_;
  std::shared_ptr<const std::vector<Label>> labels_;
};

/// Subgraph induced by `nodes` (in the given order). Node i of the result is
/// nodes[i] of `g`; edges leaving the set are dropped.
Graph induced_subgraph(const Graph& g, std::span<const NodeId> nodes);

/// Nodes reachable within `hops` hops of `root`, in BFS order (root first),
/// with their hop distance.
struct Neighborhood {
  std::vector<NodeId> nodes;
  std::vector<int> hop;
};
Neighborhood khop_neighborhood(const Graph& g, NodeId root, int hops);

/// Distinct nodes within <= `layers` hops of `root`, excluding the root.
std::size_t count_fetches(const Graph& g, NodeId root, int layers);

/// Number of aggregation messages an unrolled `layers`-deep computation tree
/// of `root` needs: the count of walks of length 1..layers starting at root.
std::uint64_t count_fetch_messages(const Graph& g, NodeId root, int layers);

}  // namespace glnn
