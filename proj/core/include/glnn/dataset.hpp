#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "glnn/graph.hpp"
#include "glnn/rng.hpp"

namespace glnn {

/// Plain-text dataset layout:
///   edges     one "u v" pair per line, 0-indexed, undirected
///   features  CSV without header, row i = node i
///   labels    one integer class id per line
struct DatasetFiles {
  std::filesystem::path edges;
  std::filesystem::path features;
  std::filesystem::path labels;

  /// `dir/edges.txt`, `dir/features.csv`, `dir/labels.txt`.
  static DatasetFiles in_directory(const std::filesystem::path& dir);
};

/// Reads a dataset, builds a symmetric CSR (self-loops and duplicates
/// dropped) and infers D from the feature columns and K as max label + 1.
Graph load_graph(const DatasetFiles& files);

/// Writes `g` in the layout `load_graph` reads.
void save_graph(const Graph& g, const DatasetFiles& files);

// ---- stochastic block model ----------------------------------------------

struct SbmConfig {
  std::size_t n_per_block = 500;
  std::size_t num_blocks = 2;
  double p_in = 0.05;
  double p_out = 0.005;
  std::size_t feat_dim = 16;
  /// Norm of each class mean. Means are feat_separation * e_(k mod D).
  double feat_separation = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Planted-partition graph: block b holds nodes [b*n, (b+1)*n) with label b.
/// Every pair is an edge independently with p_in (same block) or p_out.
/// Features are N(mu_label, I). Deterministic in `seed`.
Graph generate_sbm(const SbmConfig& cfg);

// ---- feature noise -------------------------------------------------------

/// i.i.d. standard normal matrix; the epsilon used by add_feature_noise.
Tensor gaussian_noise(std::size_t rows, std::size_t cols, std::uint64_t seed);

/// (1 - alpha) * X + alpha * eps with eps = gaussian_noise(rows, cols, seed).
Tensor add_feature_noise(const Tensor& x, double alpha, std::uint64_t seed);

}  // namespace glnn
