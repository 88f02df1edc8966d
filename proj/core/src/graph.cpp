#include "glnn/graph.hpp"

#include <algorithm>
#include <string>
#include <unordered_map>

#include "glnn/error.hpp"

namespace glnn {

Graph Graph::from_edges(std::size_t num_nodes, std::span<const Edge> edges, Tensor features,
                        std::vector<Label> labels, std::size_t num_classes) {
  std::vector<std::size_t> degree(num_nodes, 0);
  for (const auto& [u, v] : edges) {
    if (u >= num_nodes || v >= num_nodes)
      throw MalformedDatasetError("edge (" + std::to_string(u) + ", " + std::to_string(v) +
                                  ") references a node outside [0, " +
                                  std::to_string(num_nodes) + ")");
    if (u == v) continue;
    ++degree[u];
    ++degree[v];
  }
  std::vector<std::size_t> row_ptr(num_nodes + 1, 0);
  for (std::size_t v = 0; v < num_nodes; ++v) row_ptr[v + 1] = row_ptr[v] + degree[v];
  std::vector<NodeId> col_idx(row_ptr.back());
  std::vector<std::size_t> fill(row_ptr.begin(), row_ptr.end() - 1);
  for (const auto& [u, v] : edges) {
    if (u == v) continue;
    col_idx[fill[u]++] = v;
    col_idx[fill[v]++] = u;
  }
  // sort + dedup each row, then compact
  std::vector<std::size_t> compact_ptr(num_nodes + 1, 0);
  std::size_t write = 0;
  for (std::size_t v = 0; v < num_nodes; ++v) {
    auto first = col_idx.begin() + static_cast<std::ptrdiff_t>(row_ptr[v]);
    auto last = col_idx.begin() + static_cast<std::ptrdiff_t>(row_ptr[v + 1]);
    std::sort(first, last);
    auto uniq_end = std::unique(first, last);
    for (auto it = first; it != uniq_end; ++it) col_idx[write++] = *it;
    compact_ptr[v + 1] = write;
  }
  col_idx.resize(write);
  return from_csr(std::move(compact_ptr), std::move(col_idx), std::move(features),
                  std::move(labels), num_classes);
}

Graph Graph::from_csr(std::vector<std::size_t> row_ptr, std::vector<NodeId> col_idx,
                      Tensor features, std::vector<Label> labels, std::size_t num_classes) {
  if (row_ptr.empty()) throw MalformedDatasetError("row_ptr must have N+1 entries");
  const std::size_t n = row_ptr.size() - 1;
  if (row_ptr.front() != 0 || row_ptr.back() != col_idx.size())
    throw MalformedDatasetError("row_ptr does not span col_idx");
  for (std::size_t v = 0; v < n; ++v) {
    if (row_ptr[v] > row_ptr[v + 1]) throw MalformedDatasetError("row_ptr decreasing");
    for (std::size_t e = row_ptr[v]; e < row_ptr[v + 1]; ++e) {
      if (col_idx[e] >= n)
        throw MalformedDatasetError("neighbor id " + std::to_string(col_idx[e]) +
                                    " out of range");
      if (col_idx[e] == v) throw MalformedDatasetError("self-loop stored at node " + std::to_string(v));
    }
  }
  // symmetry: every (v,u) needs (u,v); rows need not be sorted
  for (std::size_t v = 0; v < n; ++v) {
    for (std::size_t e = row_ptr[v]; e < row_ptr[v + 1]; ++e) {
      const NodeId u = col_idx[e];
      auto first = col_idx.begin() + static_cast<std::ptrdiff_t>(row_ptr[u]);
      auto last = col_idx.begin() + static_cast<std::ptrdiff_t>(row_ptr[u + 1]);
      if (std::find(first, last, v) == last)
        throw MalformedDatasetError("adjacency not symmetric at (" + std::to_string(v) + ", " +
                                    std::to_string(u) + ")");
    }
  }
  Graph g;
  g.num_nodes_ = n;
  g.num_classes_ = num_classes;
  g.adj_ = std::make_shared<const Adjacency>(Adjacency{std::move(row_ptr), std::move(col_idx)});
  g.features_ = std::make_shared<const Tensor>(std::move(features));
  g.labels_ = std::make_shared<const std::vector<Label>>(std::move(labels));
  g.validate_payload();
  return g;
}

Graph Graph::features_only(Tensor features, std::vector<Label> labels, std::size_t num_classes) {
  Graph g;
  g.num_nodes_ = features.rows();
  g.num_classes_ = num_classes;
  g.features_ = std::make_shared<const Tensor>(std::move(features));
  g.labels_ = std::make_shared<const std::vector<Label>>(std::move(labels));
  g.validate_payload();
  return g;
}

void Graph::validate_payload() const {
  if (features_->rows() != num_nodes_)
    throw ShapeError("feature rows " + std::to_string(features_->rows()) + " != node count " +
                     std::to_string(num_nodes_));
  if (labels_->size() != num_nodes_)
    throw ShapeError("label count " + std::to_string(labels_->size()) + " != node count " +
                     std::to_string(num_nodes_));
  for (Label y : *labels_)
    if (y < 0 || static_cast<std::size_t>(y) >= num_classes_)
      throw MalformedDatasetError("label " + std::to_string(y) + " outside [0, " +
                                  std::to_string(num_classes_) + ")");
  if (!all_finite(features_->data())) throw MalformedDatasetError("features contain NaN/Inf");
}

const Graph::Adjacency& Graph::adj() const {
  if (!adj_) throw AdjacencyUnavailableError("graph was built without adjacency");
  return *adj_;
}

std::size_t Graph::num_edges() const { return adj().col_idx.size() / 2; }
std::span<const std::size_t> Graph::row_ptr() const { return adj().row_ptr; }
std::span<const NodeId> Graph::col_idx() const { return adj().col_idx; }

std::span<const NodeId> Graph::neighbors(NodeId v) const {
  const auto& a = adj();
  return {a.col_idx.data() + a.row_ptr[v], a.row_ptr[v + 1] - a.row_ptr[v]};
}

std::size_t Graph::degree(NodeId v) const {
  const auto& a = adj();
  return a.row_ptr[v + 1] - a.row_ptr[v];
}

std::size_t Graph::max_degree() const {
  std::size_t m = 0;
  for (NodeId v = 0; v < num_nodes_; ++v) m = std::max(m, degree(v));
  return m;
}

const Tensor& Graph::features() const {
  if (!features_) throw ShapeError("graph has no features");
  return *features_;
}

std::span<const Label> Graph::labels() const {
  if (!labels_) return {};
  return *labels_;
}

Graph Graph::with_features(Tensor features) const {
  Graph g = *this;
  g.features_ = std::make_shared<const Tensor>(std::move(features));
  g.validate_payload();
  return g;
}

Graph Graph::with_labels(std::vector<Label> labels) const {
  Graph g = *this;
  g.labels_ = std::make_shared<const std::vector<Label>>(std::move(labels));
  g.validate_payload();
  return g;
}

Graph induced_subgraph(const Graph& g, std::span<const NodeId> nodes) {
  std::unordered_map<NodeId, NodeId> local;
  local.reserve(nodes.size() * 2);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i] >= g.num_nodes()) throw IndexError("node " + std::to_string(nodes[i]) + " out of range");
    local.emplace(nodes[i], i);
  }
  std::vector<std::size_t> row_ptr(nodes.size() + 1, 0);
  std::vector<NodeId> col_idx;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (NodeId u : g.neighbors(nodes[i])) {
      auto it = local.find(u);
      if (it != local.end()) col_idx.push_back(it->second);
    }
    row_ptr[i + 1] = col_idx.size();
  }
  std::vector<Label> labels(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) labels[i] = g.labels()[nodes[i]];
  return Graph::from_csr(std::move(row_ptr), std::move(col_idx), gather_rows(g.features(), nodes),
                         std::move(labels), g.num_classes());
}

Neighborhood khop_neighborhood(const Graph& g, NodeId root, int hops) {
  if (root >= g.num_nodes()) throw IndexError("root " + std::to_string(root) + " out of range");
  Neighborhood nb;
  std::unordered_map<NodeId, int> seen;
  nb.nodes.push_back(root);
  nb.hop.push_back(0);
  seen.emplace(root, 0);
  std::size_t frontier_begin = 0;
  for (int h = 1; h <= hops; ++h) {
    const std::size_t frontier_end = nb.nodes.size();
    if (frontier_begin == frontier_end) break;
    for (std::size_t i = frontier_begin; i < frontier_end; ++i) {
      for (NodeId u : g.neighbors(nb.nodes[i])) {
        if (seen.emplace(u, h).second) {
          nb.nodes.push_back(u);
          nb.hop.push_back(h);
        }
      }
    }
    frontier_begin = frontier_end;
  }
  return nb;
}

std::size_t count_fetches(const Graph& g, NodeId root, int layers) {
  if (layers < 0) throw DomainError("layer count must be >= 0");
  return khop_neighborhood(g, root, layers).nodes.size() - 1;
}

std::uint64_t count_fetch_messages(const Graph& g, NodeId root, int layers) {
  if (layers < 0) throw DomainError("layer count must be >= 0");
  if (root >= g.num_nodes()) throw IndexError("root " + std::to_string(root) + " out of range");
  // walks[v] = number of walks of the current length from root ending at v,
  // restricted to the (layers)-ball which contains every such walk.
  const Neighborhood ball = khop_neighborhood(g, root, layers);
  std::unordered_map<NodeId, std::size_t> local;
  for (std::size_t i = 0; i < ball.nodes.size(); ++i) local.emplace(ball.nodes[i], i);
  std::vector<std::uint64_t> walks(ball.nodes.size(), 0), next(ball.nodes.size(), 0);
  walks[0] = 1;
  std::uint64_t total = 0;
  for (int len = 1; len <= layers; ++len) {
    std::fill(next.begin(), next.end(), 0);
    for (std::size_t i = 0; i < ball.nodes.size(); ++i) {
      if (walks[i] == 0) continue;
      for (NodeId u : g.neighbors(ball.nodes[i])) {
        auto it = local.find(u);
        if (it != local.end()) next[it->second] += walks[i];
      }
    }
    walks.swap(next);
    for (auto w : walks) total += w;
  }
  return total;
}

}  // namespace glnn
