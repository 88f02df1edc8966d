#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "glnn/graph.hpp"
#include "glnn/tensor.hpp"

namespace glnn {

/// Fraction of `nodes` whose predicted class equals the true label. `pred`
/// and `truth` are indexed by node id. Throws DomainError on an empty set.
double accuracy(std::span<const std::size_t> pred, std::span<const Label> truth,
                std::span<const NodeId> nodes);
/// Same, taking the argmax of each logits row as the prediction.
double accuracy(const Tensor& logits, std::span<const Label> truth, std::span<const NodeId> nodes);

/// Tr(Y^T A Y) / Tr(Y^T D Y) for a row-stochastic Y over the nodes of g,
/// computed edge by edge from the CSR arrays. With `self_loops` both A and D
/// gain the identity. Throws UndefinedMetricError when the denominator is
/// zero (for example an edgeless graph) and InvalidTargetError when a row of
/// Y is not a probability vector.
double cut_loss(const Tensor& yhat, const Graph& g, bool self_loops = false);

struct MetricRecord {
  std::string dataset;
  std::string model;
  std::uint64_t seed = 0;
  std::string metric;
  double value = 0.0;
};

struct MetricMean {
  std::string dataset;  // "all" for the across-dataset row
  std::string model;
  std::string metric;
  double mean = 0.0;
  std::size_t count = 0;
};

/// Mean per (dataset, model, metric), followed by one "all" row per
/// (model, metric) averaging the per-dataset means. Row order follows first
/// appearance in `records`.
std::vector<MetricMean> summarize_metrics(std::span<const MetricRecord> records);

/// CSV with header dataset,model,seed,metric,value. Summary rows carry
/// "mean" in the seed column.
void write_metric_csv(std::span<const MetricRecord> records, std::span<const MetricMean> means,
                      const std::filesystem::path& path);

/// Size of the expressiveness gap between an L-layer GNN and an MLP over a
/// finite feature space X with maximum degree m: the number of rooted graphs
/// a GNN may separate but an MLP must map identically is at least
/// binom(|X| + m - 2, m - 1)^(2^L - 1).
struct EquivalenceBound {
  double log10_count = 0.0;
  /// The integer value when it fits in 64 bits.
  std::optional<std::uint64_t> exact;
  /// Distinct inputs an MLP can tell apart: |X|.
  std::uint64_t mlp_classes = 0;
};

/// Requires |X| >= 2, m >= 3, L >= 1; DomainError otherwise.
EquivalenceBound equivalence_lower_bound(std::uint64_t feature_space_size, std::uint64_t max_degree,
                                         int layers);

}  // namespace glnn
