#include "glnn/dataset.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "glnn/error.hpp"

namespace glnn {

DatasetFiles DatasetFiles::in_directory(const std::filesystem::path& dir) {
  return {dir / "edges.txt", dir / "features.csv", dir / "labels.txt"};
}

namespace {

std::ifstream open_input(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw IoError("cannot open " + p.string());
  return in;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <class Int>
Int parse_int(std::string_view tok, const std::filesystem::path& file, std::size_t line) {
  Int value{};
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    throw MalformedDatasetError(file.string() + ":" + std::to_string(line) + ": bad integer '" +
                                std::string(tok) + "'");
  return value;
}

double parse_double(std::string_view tok, const std::filesystem::path& file, std::size_t line) {
  std::string s(trim(tok));
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v))
    throw MalformedDatasetError(file.string() + ":" + std::to_string(line) + ": bad number '" + s +
                                "'");
  return v;
}

}  // namespace

Graph load_graph(const DatasetFiles& files) {
  // features first: they fix N
  std::vector<double> feat;
  std::size_t n = 0, d = 0;
  {
    auto in = open_input(files.features);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (trim(line).empty()) continue;
      std::size_t cols = 0;
      std::string_view rest(line);
      while (true) {
        const auto comma = rest.find(',');
        feat.push_back(parse_double(rest.substr(0, comma), files.features, lineno));
        ++cols;
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
      }
      if (n == 0) d = cols;
      else if (cols != d)
        throw ShapeError(files.features.string() + ":" + std::to_string(lineno) + ": expected " +
                         std::to_string(d) + " columns, got " + std::to_string(cols));
      ++n;
    }
  }
  std::vector<Label> labels;
  {
    auto in = open_input(files.labels);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      auto t = trim(line);
      if (t.empty()) continue;
      const auto y = parse_int<Label>(t, files.labels, lineno);
      if (y < 0)
        throw MalformedDatasetError(files.labels.string() + ":" + std::to_string(lineno) +
                                    ": negative class id");
      labels.push_back(y);
    }
  }
  if (labels.size() != n)
    throw ShapeError("feature file has " + std::to_string(n) + " rows but label file has " +
                     std::to_string(labels.size()));
  std::vector<Edge> edges;
  {
    auto in = open_input(files.edges);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      std::istringstream ss(line);
      std::string a, b, extra;
      if (!(ss >> a)) continue;
      if (!(ss >> b) || (ss >> extra))
        throw MalformedDatasetError(files.edges.string() + ":" + std::to_string(lineno) +
                                    ": expected 'u v'");
      const auto u = parse_int<NodeId>(a, files.edges, lineno);
      const auto v = parse_int<NodeId>(b, files.edges, lineno);
      if (u >= n || v >= n)
        throw MalformedDatasetError(files.edges.string() + ":" + std::to_string(lineno) +
                                    ": node id out of range for " + std::to_string(n) + " nodes");
      edges.emplace_back(u, v);
    }
  }
  std::size_t k = 0;
  for (Label y : labels) k = std::max(k, static_cast<std::size_t>(y) + 1);
  return Graph::from_edges(n, edges, Tensor(n, d, std::move(feat)), std::move(labels), k);
}

void save_graph(const Graph& g, const DatasetFiles& files) {
  auto open = [](const std::filesystem::path& p) {
    std::ofstream out(p);
    if (!out) throw IoError("cannot write " + p.string());
    return out;
  };
  {
    auto out = open(files.edges);
    for (NodeId v = 0; v < g.num_nodes(); ++v)
      for (NodeId u : g.neighbors(v))
        if (v < u) out << v << ' ' << u << '\n';
  }
  {
    auto out = open(files.features);
    char buf[32];
    const Tensor& x = g.features();
    for (std::size_t i = 0; i < x.rows(); ++i) {
      for (std::size_t j = 0; j < x.cols(); ++j) {
        std::snprintf(buf, sizeof buf, "%.17g", x(i, j));
        out << (j ? "," : "") << buf;
      }
      out << '\n';
    }
  }
  {
    auto out = open(files.labels);
    for (Label y : g.labels()) out << y << '\n';
  }
}

// ---- SBM -------------------------------------------------------------------

void SbmConfig::validate() const {
  if (num_blocks == 0 || n_per_block == 0) throw DomainError("SBM needs at least one non-empty block");
  if (!(p_out >= 0.0 && p_out <= p_in && p_in <= 1.0))
    throw DomainError("SBM requires 0 <= p_out <= p_in <= 1");
  if (!(feat_separation >= 0.0)) throw DomainError("feat_separation must be >= 0");
  if (feat_dim == 0) throw DomainError("feat_dim must be >= 1");
  if (num_blocks > feat_dim)
    throw DomainError("orthogonal class means need num_blocks <= feat_dim");
}

namespace {

/// Visits every index in [0, total) independently with probability p, in
/// increasing order, using geometric skips.
template <class Visit>
void bernoulli_indices(std::uint64_t total, double p, Rng& rng, Visit&& visit) {
  if (p <= 0.0 || total == 0) return;
  if (p >= 1.0) {
    for (std::uint64_t t = 0; t < total; ++t) visit(t);
    return;
  }
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double log_q = std::log1p(-p);
  std::uint64_t t = 0;
  while (true) {
    double u = unif(rng);
    while (u <= 0.0) u = unif(rng);
    const double skip = std::floor(std::log(u) / log_q);
    if (skip >= static_cast<double>(total - t)) return;
    t += static_cast<std::uint64_t>(skip);
    visit(t);
    if (++t >= total) return;
  }
}

}  // namespace

Graph generate_sbm(const SbmConfig& cfg) {
  cfg.validate();
  const std::size_t n = cfg.n_per_block;
  const std::size_t k = cfg.num_blocks;
  const std::size_t total = n * k;
  const SeedStream seeds(cfg.seed);

  std::vector<Edge> edges;
  Rng edge_rng = seeds.rng("sbm/edges");
  for (std::size_t b = 0; b < k; ++b) {
    const std::size_t base = b * n;
    // upper triangle of the block, row by row
    std::size_t row = 0, row_start = 0;
    bernoulli_indices(static_cast<std::uint64_t>(n) * (n - 1) / 2, cfg.p_in, edge_rng,
                      [&](std::uint64_t t) {
                        while (t >= row_start + (n - 1 - row)) {
                          row_start += n - 1 - row;
                          ++row;
                        }
                        edges.emplace_back(base + row, base + row + 1 + (t - row_start));
                      });
    for (std::size_t c = b + 1; c < k; ++c) {
      const std::size_t other = c * n;
      bernoulli_indices(static_cast<std::uint64_t>(n) * n, cfg.p_out, edge_rng,
                        [&](std::uint64_t t) { edges.emplace_back(base + t / n, other + t % n); });
    }
  }

  Tensor x = gaussian_noise(total, cfg.feat_dim, seeds.seed_for("sbm/features"));
  std::vector<Label> labels(total);
  for (std::size_t v = 0; v < total; ++v) {
    const auto y = static_cast<Label>(v / n);
    labels[v] = y;
    x(v, static_cast<std::size_t>(y) % cfg.feat_dim) += cfg.feat_separation;
  }
  return Graph::from_edges(total, edges, std::move(x), std::move(labels), k);
}

// ---- noise -------------------------------------------------------------------

Tensor gaussian_noise(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Tensor eps(rows, cols);
  for (double& v : eps.data()) v = normal(rng);
  return eps;
}

Tensor add_feature_noise(const Tensor& x, double alpha, std::uint64_t seed) {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw DomainError("noise level alpha must lie in [0, 1], got " + std::to_string(alpha));
  if (alpha == 0.0) return x.detached();
  Tensor eps = gaussian_noise(x.rows(), x.cols(), seed);
  Tensor out(x.rows(), x.cols());
  auto o = out.data();
  auto xs = x.data();
  auto es = eps.data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = (1.0 - alpha) * xs[i] + alpha * es[i];
  return out;
}

}  // namespace glnn
