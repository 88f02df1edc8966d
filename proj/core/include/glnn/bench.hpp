#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "glnn/model.hpp"

namespace glnn {

/// Wall-clock measurements of one model configuration.
struct LatencyReport {
  std::string model;
  int layers = 0;
  std::size_t width_mult = 1;
  std::optional<std::size_t> fanout;
  std::vector<NodeId> nodes;               // measured nodes
  std::vector<double> times_ms;            // one entry per timed repetition
  std::vector<std::size_t> fetches_distinct;  // per measured node
  std::vector<std::uint64_t> fetches_multiset;
  std::optional<double> accuracy;

  std::size_t repetitions() const noexcept { return times_ms.size(); }
  double median_ms() const;
  /// Interquartile range of the repetition times (linear interpolation).
  double iqr_ms() const;
  std::uint64_t total_fetches_distinct() const;
  std::uint64_t total_fetches_multiset() const;
};

struct BenchOptions {
  std::size_t n_nodes = 10;
  int repetitions = 5;
  int warmups = 2;
  /// Cap on sampled neighbours per node and hop (GNNs only).
  std::optional<std::size_t> fanout;
  std::uint64_t seed = 0;
  /// Tag written to the report; defaults to the architecture name.
  std::string tag;
  std::size_t width_mult = 1;
};

/// Nodes measured by bench_inference: n_nodes distinct nodes drawn from the
/// "sampling" substream of `seed`, in draw order.
std::vector<NodeId> sample_nodes(std::size_t num_nodes, std::size_t count, std::uint64_t seed);

/// Times inductive inference on sampled nodes. An MLP runs on their feature
/// rows only. A GNN, for each node, materialises its L-hop neighbourhood
/// from the CSR arrays (or a fan-out sample of it), builds the induced
/// subgraph and runs the forward pass there; materialisation is included in
/// the timing. Repetitions must be >= 5; warm-ups are not reported. Throws
/// ProtocolError for an untrained model.
LatencyReport bench_inference(const Model& m, const Graph& g, const BenchOptions& opts);

/// Logits for `root` computed on its L-hop induced subgraph with the parent
/// graph's degrees. Equals row `root` of predict_logits(m, g).
std::vector<double> infer_node(const Model& m, const Graph& g, NodeId root);

/// Fan-out sampled neighbourhood: each frontier node keeps at most `fanout`
/// of its unvisited neighbours, drawn without replacement.
Neighborhood sampled_neighborhood(const Graph& g, NodeId root, int hops, std::size_t fanout, Rng& rng);

struct FetchCurveRow {
  int layers = 0;
  double mean_distinct = 0.0;
  double mean_multiset = 0.0;
};

/// Mean distinct fetches and multiset messages over `sample` for every L in
/// [l_min, l_max]. Throws DomainError when l_min < 1 or l_max < l_min.
std::vector<FetchCurveRow> fetch_curve(const Graph& g, int l_min, int l_max,
                                       std::span<const NodeId> sample);

/// Per-fetch latency for two storage tiers. With `hop_barrier`, every hop
/// additionally waits one round trip before the next hop can be issued.
struct FetchCostModel {
  double memory_us = 0.1;
  double disk_us = 100.0;
  bool hop_barrier = true;

  void validate() const;
};

struct ProjectedLatency {
  int layers = 0;
  double fetches = 0.0;
  double memory_us = 0.0;
  double disk_us = 0.0;
};

/// latency = (fetches + L * hop_barrier) * per-fetch latency, per tier, using
/// the mean distinct fetches of each curve row.
std::vector<ProjectedLatency> simulate_fetch_cost(std::span<const FetchCurveRow> curve,
                                                  const FetchCostModel& cost);

/// Least-squares fits of y against x: linear y = a + b x, and exponential
/// y = exp(a + b x) fitted in log space. Both R^2 are measured on y itself.
struct GrowthFit {
  double linear_slope = 0.0;
  double linear_r2 = 0.0;
  double exp_rate = 0.0;
  double exp_r2 = 0.0;
};
GrowthFit fit_growth(std::span<const double> x, std::span<const double> y);

/// One CSV row per report: model,L,w,fanout,n_nodes,rep,time_ms,
/// fetches_distinct,fetches_multiset where rep is the repetition count,
/// time_ms the median and the fetch columns totals over measured nodes. An
/// empty fanout cell means full neighbourhoods.
struct LatencyRow {
  std::string model;
  int layers = 0;
  std::size_t width_mult = 1;
  std::optional<std::size_t> fanout;
  std::size_t n_nodes = 0;
  std::size_t reps = 0;
  double time_ms = 0.0;
  std::uint64_t fetches_distinct = 0;
  std::uint64_t fetches_multiset = 0;

  bool operator==(const LatencyRow&) const = default;
};

LatencyRow summarize(const LatencyReport& r);

/// Writes the CSV to `path`. With `svg`, also writes <stem>_time_vs_L.svg
/// (median time against L per model) and <stem>_acc_vs_time.svg (accuracy
/// against median time for reports that carry an accuracy) beside it.
void emit_report(std::span<const LatencyReport> reports, const std::filesystem::path& path,
                 bool svg = true);
std::vector<LatencyRow> read_report_csv(const std::filesystem::path& path);

}  // namespace glnn
