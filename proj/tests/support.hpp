#pragma once

// Hand-rolled generators and dense reference implementations shared by the
// unit tests. Everything here is deliberately naive.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "glnn/graph.hpp"
#include "glnn/rng.hpp"
#include "glnn/tensor.hpp"

namespace glnn::testing {

inline Tensor random_tensor(std::size_t rows, std::size_t cols, Rng& rng, double scale = 1.0) {
  std::normal_distribution<double> dist(0.0, scale);
  Tensor t(rows, cols);
  for (double& v : t.data()) v = dist(rng);
  return t;
}

/// Erdos-Renyi graph with random features and labels.
inline Graph random_graph(std::size_t n, double p, std::size_t dim, std::size_t classes,
                          std::uint64_t seed) {
  Rng rng(seed);
  std::bernoulli_distribution edge(p);
  std::vector<Edge> edges;
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = u + 1; v < n; ++v)
      if (edge(rng)) edges.emplace_back(u, v);
  std::uniform_int_distribution<int> label(0, static_cast<int>(classes) - 1);
  std::vector<Label> y(n);
  for (Label& l : y) l = label(rng);
  for (std::size_t c = 0; c < std::min(classes, n); ++c) y[c] = static_cast<Label>(c);
  return Graph::from_edges(n, edges, random_tensor(n, dim, rng), std::move(y), classes);
}

inline Graph path_graph(std::size_t n, std::size_t dim = 1) {
  std::vector<Edge> edges;
  for (NodeId v = 0; v + 1 < n; ++v) edges.emplace_back(v, v + 1);
  return Graph::from_edges(n, edges, Tensor(n, dim, 1.0), std::vector<Label>(n, 0), 1);
}

inline std::vector<std::vector<double>> dense_adjacency(const Graph& g) {
  const std::size_t n = g.num_nodes();
  std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
  for (NodeId v = 0; v < n; ++v)
    for (NodeId u : g.neighbors(v)) a[v][u] = 1.0;
  return a;
}

inline Tensor dense_matmul(const std::vector<std::vector<double>>& a, const Tensor& b) {
  Tensor out(a.size(), b.cols());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t k = 0; k < b.rows(); ++k)
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += a[i][k] * b(k, j);
  return out;
}

/// D~^-1/2 (A + I) D~^-1/2 as a dense matrix.
inline std::vector<std::vector<double>> dense_normalized_adjacency(const Graph& g) {
  auto a = dense_adjacency(g);
  const std::size_t n = a.size();
  std::vector<double> deg(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    a[i][i] = 1.0;
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) deg[i] += a[i][j];
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a[i][j] /= std::sqrt(deg[i] * deg[j]);
  return a;
}

/// BFS distinct-node count within `layers` hops, excluding the root.
inline std::size_t bfs_fetch_oracle(const Graph& g, NodeId root, int layers) {
  std::vector<int> dist(g.num_nodes(), -1);
  std::vector<NodeId> queue{root};
  dist[root] = 0;
  std::size_t count = 0;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const NodeId v = queue[head];
    if (dist[v] == layers) continue;
    for (NodeId u : g.neighbors(v)) {
      if (dist[u] >= 0) continue;
      dist[u] = dist[v] + 1;
      ++count;
      queue.push_back(u);
    }
  }
  return count;
}

inline double max_abs_diff(const Tensor& a, const Tensor& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    worst = std::max(worst, std::abs(a.data()[i] - b.data()[i]));
  return worst;
}

/// Fresh scratch directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("glnn_test_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace glnn::testing
