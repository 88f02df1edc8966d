#include "glnn/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

#include "glnn/error.hpp"
#include "glnn/loss.hpp"

namespace glnn {

double accuracy(std::span<const std::size_t> pred, std::span<const Label> truth,
                std::span<const NodeId> nodes) {
  if (nodes.empty()) throw DomainError("accuracy over an empty node set");
  std::size_t correct = 0;
  for (NodeId v : nodes) {
    if (v >= pred.size() || v >= truth.size())
      throw IndexError("accuracy: node " + std::to_string(v) + " out of range");
    if (static_cast<Label>(pred[v]) == truth[v]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(nodes.size());
}

double accuracy(const Tensor& logits, std::span<const Label> truth, std::span<const NodeId> nodes) {
  const auto pred = argmax_rows(logits);
  return accuracy(pred, truth, nodes);
}

double cut_loss(const Tensor& yhat, const Graph& g, bool self_loops) {
  if (yhat.rows() != g.num_nodes())
    throw ShapeError("cut_loss: " + std::to_string(yhat.rows()) + " rows for " +
                     std::to_string(g.num_nodes()) + " nodes");
  validate_probability_rows(yhat);
  const auto row_ptr = g.row_ptr();
  const auto col_idx = g.col_idx();
  const std::size_t k = yhat.cols();
  double num = 0.0;
  double den = 0.0;
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    const double* yv = yhat.row(v).data();
    double sq = 0.0;
    for (std::size_t c = 0; c < k; ++c) sq += yv[c] * yv[c];
    const std::size_t deg = row_ptr[v + 1] - row_ptr[v] + (self_loops ? 1 : 0);
    den += static_cast<double>(deg) * sq;
    if (self_loops) num += sq;
    for (std::size_t e = row_ptr[v]; e < row_ptr[v + 1]; ++e) {
      const double* yu = yhat.row(col_idx[e]).data();
      double dot = 0.0;
      for (std::size_t c = 0; c < k; ++c) dot += yv[c] * yu[c];
      num += dot;
    }
  }
  if (den == 0.0) throw UndefinedMetricError("cut loss is undefined: Tr(Y^T D Y) = 0");
  return num / den;
}

std::vector<MetricMean> summarize_metrics(std::span<const MetricRecord> records) {
  std::vector<MetricMean> rows;
  std::map<std::tuple<std::string, std::string, std::string>, std::size_t> index;
  for (const auto& r : records) {
    auto key = std::make_tuple(r.dataset, r.model, r.metric);
    auto [it, fresh] = index.emplace(key, rows.size());
    if (fresh) rows.push_back({r.dataset, r.model, r.metric, 0.0, 0});
    rows[it->second].mean += r.value;
    ++rows[it->second].count;
  }
  for (auto& row : rows) row.mean /= static_cast<double>(row.count);

  std::vector<MetricMean> overall;
  std::map<std::pair<std::string, std::string>, std::size_t> overall_index;
  for (const auto& row : rows) {
    auto [it, fresh] = overall_index.emplace(std::make_pair(row.model, row.metric), overall.size());
    if (fresh) overall.push_back({"all", row.model, row.metric, 0.0, 0});
    overall[it->second].mean += row.mean;
    ++overall[it->second].count;
  }
  for (auto& row : overall) {
    row.mean /= static_cast<double>(row.count);
    rows.push_back(row);
  }
  return rows;
}

void write_metric_csv(std::span<const MetricRecord> records, std::span<const MetricMean> means,
                      const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  char buf[64];
  out << "dataset,model,seed,metric,value\n";
  for (const auto& r : records) {
    std::snprintf(buf, sizeof buf, "%.17g", r.value);
    out << r.dataset << ',' << r.model << ',' << r.seed << ',' << r.metric << ',' << buf << '\n';
  }
  for (const auto& m : means) {
    std::snprintf(buf, sizeof buf, "%.17g", m.mean);
    out << m.dataset << ',' << m.model << ",mean," << m.metric << ',' << buf << '\n';
  }
  if (!out) throw IoError("write failed for " + path.string());
}

namespace {

std::optional<std::uint64_t> checked_binom(std::uint64_t n, std::uint64_t k) {
  if (k > n - k) k = n - k;
  unsigned __int128 r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;  // exact: r * (n-k+i) is divisible by i at every step
    if (r > UINT64_MAX) return std::nullopt;
  }
  return static_cast<std::uint64_t>(r);
}

std::optional<std::uint64_t> checked_pow(std::uint64_t base, std::uint64_t exp) {
  unsigned __int128 r = 1;
  for (std::uint64_t i = 0; i < exp; ++i) {
    r *= base;
    if (r > UINT64_MAX) return std::nullopt;
  }
  return static_cast<std::uint64_t>(r);
}

}  // namespace

EquivalenceBound equivalence_lower_bound(std::uint64_t feature_space_size, std::uint64_t max_degree,
                                         int layers) {
  if (feature_space_size < 2 || max_degree < 3 || layers < 1)
    throw DomainError("equivalence_lower_bound requires |X| >= 2, max degree m >= 3 and L >= 1");
  if (layers > 62) throw DomainError("equivalence_lower_bound: L too large for a 2^L - 1 exponent");
  const std::uint64_t n = feature_space_size + max_degree - 2;
  const std::uint64_t k = max_degree - 1;
  const std::uint64_t exponent = (std::uint64_t{1} << layers) - 1;

  EquivalenceBound b;
  b.mlp_classes = feature_space_size;
  const double nd = static_cast<double>(n);
  const double kd = static_cast<double>(k);
  const double log_binom = std::lgamma(nd + 1.0) - std::lgamma(kd + 1.0) - std::lgamma(nd - kd + 1.0);
  b.log10_count = static_cast<double>(exponent) * log_binom / std::log(10.0);
  if (auto binom = checked_binom(n, k)) {
    b.exact = checked_pow(*binom, exponent);
    if (b.exact) b.log10_count = std::log10(static_cast<double>(*b.exact));
  }
  return b;
}

}  // namespace glnn
