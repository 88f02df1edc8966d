#include "glnn/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "glnn/error.hpp"

namespace glnn {

namespace {

double quantile(std::vector<double> v, double q) {
  if (v.empty()) throw DomainError("quantile of an empty sample");
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = static_cast<std::size_t>(std::ceil(pos));
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

double LatencyReport::median_ms() const { return quantile(times_ms, 0.5); }

double LatencyReport::iqr_ms() const { return quantile(times_ms, 0.75) - quantile(times_ms, 0.25); }

std::uint64_t LatencyReport::total_fetches_distinct() const {
  return std::accumulate(fetches_distinct.begin(), fetches_distinct.end(), std::uint64_t{0});
}

std::uint64_t LatencyReport::total_fetches_multiset() const {
  return std::accumulate(fetches_multiset.begin(), fetches_multiset.end(), std::uint64_t{0});
}

std::vector<NodeId> sample_nodes(std::size_t num_nodes, std::size_t count, std::uint64_t seed) {
  if (count > num_nodes)
    throw DomainError("cannot sample " + std::to_string(count) + " of " + std::to_string(num_nodes) + " nodes");
  Rng rng = SeedStream(seed).rng("sampling");
  std::vector<NodeId> out;
  std::unordered_set<NodeId> taken;
  std::uniform_int_distribution<NodeId> pick(0, num_nodes - 1);
  while (out.size() < count) {
    const NodeId v = pick(rng);
    if (taken.insert(v).second) out.push_back(v);
  }
  return out;
}

Neighborhood sampled_neighborhood(const Graph& g, NodeId root, int hops, std::size_t fanout, Rng& rng) {
  if (root >= g.num_nodes()) throw IndexError("root " + std::to_string(root) + " out of range");
  if (fanout == 0) throw DomainError("fanout must be positive");
  Neighborhood nb;
  std::unordered_set<NodeId> seen{root};
  nb.nodes.push_back(root);
  nb.hop.push_back(0);
  std::size_t frontier_begin = 0;
  std::vector<NodeId> candidates;
  for (int h = 1; h <= hops; ++h) {
    const std::size_t frontier_end = nb.nodes.size();
    for (std::size_t i = frontier_begin; i < frontier_end; ++i) {
      candidates.clear();
      for (NodeId u : g.neighbors(nb.nodes[i]))
        if (!seen.count(u)) candidates.push_back(u);
      const std::size_t keep = std::min(fanout, candidates.size());
      // partial Fisher-Yates: the first `keep` entries are a uniform sample
      for (std::size_t j = 0; j < keep; ++j) {
        std::uniform_int_distribution<std::size_t> pick(j, candidates.size() - 1);
        std::swap(candidates[j], candidates[pick(rng)]);
        seen.insert(candidates[j]);
        nb.nodes.push_back(candidates[j]);
        nb.hop.push_back(h);
      }
    }
    frontier_begin = frontier_end;
  }
  return nb;
}

namespace {

std::vector<double> root_logits_on(const Model& m, const Graph& g, const Neighborhood& nb, bool parent_degrees) {
  const Graph sub = induced_subgraph(g, nb.nodes);
  std::vector<std::size_t> degrees;
  if (parent_degrees) {
    degrees.reserve(nb.nodes.size());
    for (NodeId v : nb.nodes) degrees.push_back(g.degree(v));
  }
  const Tensor logits = predict_logits(m, sub, sub.features(), degrees);
  const auto row = logits.row(0);
  return {row.begin(), row.end()};
}

}  // namespace

std::vector<double> infer_node(const Model& m, const Graph& g, NodeId root) {
  return root_logits_on(m, g, khop_neighborhood(g, root, m.receptive_field()), true);
}

LatencyReport bench_inference(const Model& m, const Graph& g, const BenchOptions& opts) {
  if (!m.trained) throw ProtocolError("bench_inference needs a trained model");
  if (opts.repetitions < 5) throw DomainError("bench_inference needs at least 5 repetitions");
  if (opts.warmups < 0) throw DomainError("warm-up count must be non-negative");
  const int L = m.receptive_field();
  const bool graph_free = !uses_graph(m.arch);

  LatencyReport r;
  r.model = opts.tag.empty() ? to_string(m.arch) : opts.tag;
  r.layers = graph_free ? static_cast<int>(std::get<MlpParams>(m.params).num_layers()) : L;
  r.width_mult = opts.width_mult;
  r.fanout = graph_free ? std::nullopt : opts.fanout;
  r.nodes = sample_nodes(g.num_nodes(), opts.n_nodes, opts.seed);

  for (NodeId v : r.nodes) {
    if (graph_free) {
      r.fetches_distinct.push_back(0);
      r.fetches_multiset.push_back(0);
    } else if (!opts.fanout) {
      r.fetches_distinct.push_back(count_fetches(g, v, L));
      r.fetches_multiset.push_back(count_fetch_messages(g, v, L));
    }
  }

  std::vector<Neighborhood> sampled;
  if (!graph_free && opts.fanout) {
    Rng rng = SeedStream(opts.seed).rng("sampling/fanout");
    for (NodeId v : r.nodes) {
      sampled.push_back(sampled_neighborhood(g, v, L, *opts.fanout, rng));
      r.fetches_distinct.push_back(sampled.back().nodes.size() - 1);
      r.fetches_multiset.push_back(sampled.back().nodes.size() - 1);
    }
  }

  volatile double sink = 0.0;
  auto run_once = [&] {
    if (graph_free) {
      const Tensor x = gather_rows(g.features(), r.nodes);
      const Tensor logits = predict_logits(m, g, x, {});
      sink = sink + logits.data()[0];
      return;
    }
    for (std::size_t i = 0; i < r.nodes.size(); ++i) {
      const auto logits = opts.fanout ? root_logits_on(m, g, sampled[i], false)
                                      : root_logits_on(m, g, khop_neighborhood(g, r.nodes[i], L), true);
      sink = sink + logits[0];
    }
  };
  for (int i = 0; i < opts.warmups; ++i) run_once();
  for (int i = 0; i < opts.repetitions; ++i) {
    const auto start = std::chrono::steady_clock::now();
    run_once();
    const auto stop = std::chrono::steady_clock::now();
    r.times_ms.push_back(std::chrono::duration<double, std::milli>(stop - start).count());
  }
  return r;
}

std::vector<FetchCurveRow> fetch_curve(const Graph& g, int l_min, int l_max, std::span<const NodeId> sample) {
  if (l_min < 1 || l_max < l_min) throw DomainError("fetch_curve needs 1 <= l_min <= l_max");
  if (sample.empty()) throw DomainError("fetch_curve needs a non-empty node sample");
  std::vector<FetchCurveRow> rows;
  for (int L = l_min; L <= l_max; ++L) {
    FetchCurveRow row;
    row.layers = L;
    for (NodeId v : sample) {
      row.mean_distinct += static_cast<double>(count_fetches(g, v, L));
      row.mean_multiset += static_cast<double>(count_fetch_messages(g, v, L));
    }
    row.mean_distinct /= static_cast<double>(sample.size());
    row.mean_multiset /= static_cast<double>(sample.size());
    rows.push_back(row);
  }
  return rows;
}

void FetchCostModel::validate() const {
  if (!(memory_us >= 0.0) || !(disk_us >= 0.0)) throw DomainError("fetch latencies must be non-negative");
}

std::vector<ProjectedLatency> simulate_fetch_cost(std::span<const FetchCurveRow> curve,
                                                  const FetchCostModel& cost) {
  cost.validate();
  std::vector<ProjectedLatency> out;
  for (const auto& row : curve) {
    const double round_trips = row.mean_distinct + (cost.hop_barrier ? row.layers : 0);
    out.push_back({row.layers, row.mean_distinct, round_trips * cost.memory_us, round_trips * cost.disk_us});
  }
  return out;
}

GrowthFit fit_growth(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 3) throw DomainError("fit_growth needs >= 3 paired points");
  for (double v : y)
    if (!(v > 0.0)) throw DomainError("fit_growth needs positive y values");
  const auto n = static_cast<double>(x.size());
  auto line = [&](std::span<const double> ys) {
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      sxy += (x[i] - mx) * (ys[i] - my);
      sxx += (x[i] - mx) * (x[i] - mx);
    }
    const double b = sxy / sxx;
    return std::make_pair(my - b * mx, b);
  };
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double ss_tot = 0.0;
  for (double v : y) ss_tot += (v - my) * (v - my);
  auto r2 = [&](auto predict) {
    double ss_res = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double e = y[i] - predict(x[i]);
      ss_res += e * e;
    }
    return ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  };

  GrowthFit fit;
  const auto [a, b] = line(y);
  fit.linear_slope = b;
  fit.linear_r2 = r2([&](double v) { return a + b * v; });
  std::vector<double> logy(y.size());
  std::transform(y.begin(), y.end(), logy.begin(), [](double v) { return std::log(v); });
  const auto [la, lb] = line(logy);
  fit.exp_rate = lb;
  fit.exp_r2 = r2([&](double v) { return std::exp(la + lb * v); });
  return fit;
}

// ---- reports ----------------------------------------------------------------------

LatencyRow summarize(const LatencyReport& r) {
  return {r.model, r.layers, r.width_mult, r.fanout, r.nodes.size(), r.repetitions(), r.median_ms(),
          r.total_fetches_distinct(), r.total_fetches_multiset()};
}

namespace {

constexpr const char* kHeader = "model,L,w,fanout,n_nodes,rep,time_ms,fetches_distinct,fetches_multiset";

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Point {
  double x, y;
};

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"};

/// Minimal SVG chart: one polyline (or point set) per series, linear axes.
void write_svg(const std::filesystem::path& path, const std::string& title, const std::string& xlabel,
               const std::string& ylabel, const std::vector<std::pair<std::string, std::vector<Point>>>& series,
               bool lines) {
  constexpr double W = 640, H = 420, left = 70, right = 150, top = 40, bottom = 50;
  double x0 = INFINITY, x1 = -INFINITY, y0 = 0.0, y1 = -INFINITY;
  for (const auto& [name, pts] : series)
    for (const auto& p : pts) {
      x0 = std::min(x0, p.x);
      x1 = std::max(x1, p.x);
      y0 = std::min(y0, p.y);
      y1 = std::max(y1, p.y);
    }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y1 = 1;
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y1 = y0 + 1;
  auto sx = [&](double x) { return left + (x - x0) / (x1 - x0) * (W - left - right); };
  auto sy = [&](double y) { return H - bottom - (y - y0) / (y1 - y0) * (H - top - bottom); };

  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << title << "</text>\n"
      << "<line x1=\"" << left << "\" y1=\"" << H - bottom << "\" x2=\"" << W - right << "\" y2=\"" << H - bottom
      << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << H - bottom
      << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = x0 + (x1 - x0) * i / 4.0, yv = y0 + (y1 - y0) * i / 4.0;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", xv);
    out << "<text x=\"" << sx(xv) << "\" y=\"" << H - bottom + 16 << "\" text-anchor=\"middle\">" << buf << "</text>\n";
    std::snprintf(buf, sizeof buf, "%.3g", yv);
    out << "<text x=\"" << left - 6 << "\" y=\"" << sy(yv) + 4 << "\" text-anchor=\"end\">" << buf << "</text>\n";
  }
  out << "<text x=\"" << (left + W - right) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">" << xlabel
      << "</text>\n"
      << "<text x=\"16\" y=\"" << (top + H - bottom) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << (top + H - bottom) / 2 << ")\">" << ylabel << "</text>\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const auto& [name, pts] = series[s];
    const char* color = kPalette[s % std::size(kPalette)];
    if (lines && pts.size() > 1) {
      out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
      for (const auto& p : pts) out << sx(p.x) << ',' << sy(p.y) << ' ';
      out << "\"/>\n";
    }
    for (const auto& p : pts)
      out << "<circle cx=\"" << sx(p.x) << "\" cy=\"" << sy(p.y) << "\" r=\"4\" fill=\"" << color << "\"/>\n";
    const double ly = top + 18.0 * static_cast<double>(s);
    out << "<rect x=\"" << W - right + 12 << "\" y=\"" << ly << "\" width=\"10\" height=\"10\" fill=\"" << color
        << "\"/>\n<text x=\"" << W - right + 28 << "\" y=\"" << ly + 9 << "\">" << name << "</text>\n";
  }
  out << "</svg>\n";
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace

void emit_report(std::span<const LatencyReport> reports, const std::filesystem::path& path, bool svg) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << kHeader << '\n';
  for (const auto& r : reports) {
    const LatencyRow row = summarize(r);
    out << row.model << ',' << row.layers << ',' << row.width_mult << ','
        << (row.fanout ? std::to_string(*row.fanout) : std::string()) << ',' << row.n_nodes << ',' << row.reps
        << ',' << fmt_double(row.time_ms) << ',' << row.fetches_distinct << ',' << row.fetches_multiset << '\n';
  }
  out.close();
  if (!out) throw IoError("write failed for " + path.string());
  if (!svg) return;

  std::vector<std::pair<std::string, std::vector<Point>>> by_model;
  std::map<std::string, std::size_t> index;
  std::vector<std::pair<std::string, std::vector<Point>>> scatter;
  for (const auto& r : reports) {
    std::string key = r.model;
    if (r.width_mult != 1) key += "w" + std::to_string(r.width_mult);
    if (r.fanout) key += "-fan" + std::to_string(*r.fanout);
    auto [it, fresh] = index.emplace(key, by_model.size());
    if (fresh) by_model.push_back({key, {}});
    by_model[it->second].second.push_back({static_cast<double>(r.layers), r.median_ms()});
    if (r.accuracy) scatter.push_back({key + "-L" + std::to_string(r.layers), {{r.median_ms(), *r.accuracy}}});
  }
  for (auto& [name, pts] : by_model)
    std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) { return a.x < b.x; });
  const auto stem = path.parent_path() / path.stem();
  write_svg(stem.string() + "_time_vs_L.svg", "Inference time vs layers", "layers (L)", "median time (ms)",
            by_model, true);
  write_svg(stem.string() + "_acc_vs_time.svg", "Accuracy vs inference time", "median time (ms)", "accuracy",
            scatter, false);
}

std::vector<LatencyRow> read_report_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kHeader)
    throw MalformedDatasetError(path.string() + ": unexpected header");
  std::vector<LatencyRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() == 8 && line.back() == ',') cells.emplace_back();
    if (cells.size() != 9)
      throw MalformedDatasetError(path.string() + ":" + std::to_string(lineno) + ": expected 9 fields");
    try {
      LatencyRow r;
      r.model = cells[0];
      r.layers = std::stoi(cells[1]);
      r.width_mult = std::stoull(cells[2]);
      if (!cells[3].empty()) r.fanout = std::stoull(cells[3]);
      r.n_nodes = std::stoull(cells[4]);
      r.reps = std::stoull(cells[5]);
      r.time_ms = std::stod(cells[6]);
      r.fetches_distinct = std::stoull(cells[7]);
      r.fetches_multiset = std::stoull(cells[8]);
      rows.push_back(std::move(r));
    } catch (const std::logic_error&) {
      throw MalformedDatasetError(path.string() + ":" + std::to_string(lineno) + ": not a number");
    }
  }
  return rows;
}

}  // namespace glnn
