#include "glnn/teacher.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "glnn/error.hpp"
#include "glnn/loss.hpp"
#include "glnn/metrics.hpp"

namespace glnn {

TeacherHparams TeacherHparams::defaults(Arch arch) {
  TeacherHparams hp;
  hp.arch = arch;
  switch (arch) {
    case Arch::sage: break;
    case Arch::gcn:
      hp.hidden_dim = 64;
      hp.weight_decay = 1e-3;
      hp.dropout = 0.8;
      break;
    case Arch::appnp:
      hp.hidden_dim = 64;
      hp.weight_decay = 0.01;
      hp.dropout = 0.5;
      break;
    case Arch::mlp: throw DomainError("an MLP is not a teacher architecture");
  }
  return hp;
}

void TeacherHparams::validate() const {
  if (arch == Arch::mlp) throw DomainError("an MLP is not a teacher architecture");
  if (num_layers < 1) throw DomainError("teacher needs at least one layer");
  if (hidden_dim < 1) throw DomainError("teacher hidden_dim must be positive");
  if (!(lr > 0.0)) throw DomainError("teacher lr must be positive");
  if (!(weight_decay >= 0.0)) throw DomainError("teacher weight_decay must be non-negative");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw DomainError("teacher dropout outside [0, 1)");
  if (max_epochs < 1 || patience < 1) throw DomainError("teacher epochs and patience must be positive");
}

Model init_teacher(const TeacherHparams& hp, std::size_t in_dim, std::size_t num_classes, Rng& rng) {
  hp.validate();
  Model m;
  m.arch = hp.arch;
  m.role = "teacher";
  if (hp.arch == Arch::appnp) {
    AppnpParams p;
    p.predictor = MlpParams::init(in_dim, hp.hidden_dim, num_classes, hp.num_layers, hp.dropout,
                                  Norm::none, rng);
    p.power_iterations = hp.power_iterations;
    p.teleport = hp.teleport;
    p.validate();
    m.params = std::move(p);
  } else {
    m.params = SageParams::init(in_dim, hp.hidden_dim, num_classes, hp.num_layers, hp.dropout, rng);
  }
  return m;
}

TrainedTeacher fit_teacher(const Graph& g, std::span<const NodeId> labeled,
                           std::span<const NodeId> val, const TeacherHparams& hp,
                           const SeedStream& seeds) {
  if (labeled.empty()) throw InsufficientLabelsError("teacher training needs labeled nodes");
  if (val.empty()) throw DomainError("teacher training needs validation nodes");
  Rng init_rng = seeds.rng("teacher/init");
  Rng dropout_rng = seeds.rng("teacher/dropout");
  TrainedTeacher out{init_teacher(hp, g.feature_dim(), g.num_classes(), init_rng), {}};

  std::vector<Label> labeled_y;
  labeled_y.reserve(labeled.size());
  for (NodeId v : labeled) labeled_y.push_back(g.labels()[v]);
  const std::vector<NodeId> val_nodes(val.begin(), val.end());

  FitOptions opts;
  opts.adam.lr = hp.lr;
  opts.adam.weight_decay = hp.weight_decay;
  opts.max_epochs = hp.max_epochs;
  opts.patience = hp.patience;
  out.trace = fit(
      out.model, g,
      [&](const Tensor& logits) { return cross_entropy(logits, labeled, labeled_y); },
      [&](const Model& m) { return accuracy(predict_logits(m, g), g.labels(), val_nodes); }, opts,
      dropout_rng);
  return out;
}

TrainedTeacher train_teacher(const Graph& g, const NodeSplit& split, Setting setting,
                             const TeacherHparams& hp, const SeedStream& seeds) {
  split.validate(g.num_nodes());
  TrainedTeacher t;
  if (setting == Setting::transductive) {
    t = fit_teacher(g, split.labeled, split.val, hp, seeds);
  } else {
    const SubgraphPair pair = partition_inductive(g, split);
    t = fit_teacher(pair.g_obs, pair.to_obs(split.labeled), pair.to_obs(split.val), hp, seeds);
  }
  t.model.setting = setting;
  return t;
}

// ---- soft targets ---------------------------------------------------------------

bool SoftTargets::contains(NodeId v) const noexcept {
  return std::binary_search(nodes.begin(), nodes.end(), v);
}

std::size_t SoftTargets::index_of(NodeId v) const {
  auto it = std::lower_bound(nodes.begin(), nodes.end(), v);
  if (it == nodes.end() || *it != v)
    throw MissingTargetError("no soft target for node " + std::to_string(v));
  return static_cast<std::size_t>(it - nodes.begin());
}

Tensor SoftTargets::gather(std::span<const NodeId> ids) const {
  Tensor out(ids.size(), probs.cols());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const auto src = probs.row(index_of(ids[i]));
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

void SoftTargets::validate() const {
  if (probs.rows() != nodes.size())
    throw ShapeError("soft targets: " + std::to_string(probs.rows()) + " rows for " +
                     std::to_string(nodes.size()) + " nodes");
  for (std::size_t i = 1; i < nodes.size(); ++i)
    if (nodes[i - 1] >= nodes[i]) throw InvalidTargetError("soft target node ids must be sorted and unique");
  validate_probability_rows(probs);
}

SoftTargets predict_soft_targets(const Model& m, const Graph& g, std::span<const NodeId> nodes,
                                 std::span<const NodeId> local_to_global) {
  if (!local_to_global.empty() && local_to_global.size() != g.num_nodes())
    throw ShapeError("local_to_global must have one entry per node");
  for (NodeId v : nodes)
    if (v >= g.num_nodes())
      throw IndexError("node " + std::to_string(v) + " is outside a graph of " +
                       std::to_string(g.num_nodes()) + " nodes");
  const Tensor probs = softmax_rows(predict_logits(m, g));

  std::vector<std::pair<NodeId, NodeId>> keyed;  // (global, local)
  keyed.reserve(nodes.size());
  for (NodeId v : nodes) keyed.emplace_back(local_to_global.empty() ? v : local_to_global[v], v);
  std::sort(keyed.begin(), keyed.end());
  keyed.erase(std::unique(keyed.begin(), keyed.end()), keyed.end());

  SoftTargets z;
  z.probs = Tensor(keyed.size(), probs.cols());
  for (std::size_t i = 0; i < keyed.size(); ++i) {
    z.nodes.push_back(keyed[i].first);
    const auto src = probs.row(keyed[i].second);
    std::copy(src.begin(), src.end(), z.probs.row(i).begin());
  }
  return z;
}

void save_soft_targets(const SoftTargets& z, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "node_id";
  for (std::size_t c = 0; c < z.num_classes(); ++c) out << ",p_" << c;
  out << '\n';
  char buf[40];
  for (std::size_t i = 0; i < z.size(); ++i) {
    out << z.nodes[i];
    for (double p : z.probs.row(i)) {
      std::snprintf(buf, sizeof buf, "%.17g", p);
      out << ',' << buf;
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed for " + path.string());
}

SoftTargets load_soft_targets(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind("node_id", 0) != 0)
    throw MalformedDatasetError(path.string() + ": missing node_id header");
  const std::size_t k = static_cast<std::size_t>(std::count(line.begin(), line.end(), ','));
  std::vector<std::pair<NodeId, std::vector<double>>> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != k + 1)
      throw MalformedDatasetError(path.string() + ":" + std::to_string(lineno) + ": expected " +
                                  std::to_string(k + 1) + " fields");
    try {
      std::vector<double> p;
      for (std::size_t c = 1; c <= k; ++c) p.push_back(std::stod(cells[c]));
      rows.emplace_back(static_cast<NodeId>(std::stoull(cells[0])), std::move(p));
    } catch (const std::logic_error&) {
      throw MalformedDatasetError(path.string() + ":" + std::to_string(lineno) + ": not a number");
    }
  }
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  SoftTargets z;
  z.probs = Tensor(rows.size(), k);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    z.nodes.push_back(rows[i].first);
    std::copy(rows[i].second.begin(), rows[i].second.end(), z.probs.row(i).begin());
  }
  z.validate();
  return z;
}

}  // namespace glnn
