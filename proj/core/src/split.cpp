#include "glnn/split.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <string>

#include "glnn/error.hpp"
#include "glnn/rng.hpp"

namespace glnn {

const char* to_string(Setting s) noexcept {
  return s == Setting::transductive ? "tran" : "ind";
}

Setting parse_setting(std::string_view text) {
  if (text == "tran" || text == "transductive") return Setting::transductive;
  if (text == "ind" || text == "inductive") return Setting::inductive;
  throw DomainError("unknown setting '" + std::string(text) + "' (expected tran or ind)");
}

void NodeSplit::validate(std::size_t num_nodes) const {
  std::vector<char> used(num_nodes, 0);
  for (const auto* set : {&labeled, &val, &test_obs, &test_ind}) {
    for (NodeId v : *set) {
      if (v >= num_nodes) throw DomainError("split references node " + std::to_string(v));
      if (used[v]) throw DomainError("split sets overlap at node " + std::to_string(v));
      used[v] = 1;
    }
  }
  if (!(ind_rate >= 0.0 && ind_rate < 1.0)) throw DomainError("ind_rate outside [0, 1)");
}

NodeSplit make_split(const Graph& g, std::size_t labels_per_class, double val_fraction,
                     double ind_rate, std::uint64_t seed) {
  if (!(ind_rate >= 0.0 && ind_rate <= 0.9))
    throw DomainError("ind_rate must lie in [0, 0.9], got " + std::to_string(ind_rate));
  if (!(val_fraction >= 0.0 && val_fraction < 1.0))
    throw DomainError("val_fraction must lie in [0, 1)");
  const SeedStream seeds(seed);
  Rng rng = seeds.rng("split");

  std::vector<std::vector<NodeId>> by_class(g.num_classes());
  for (NodeId v = 0; v < g.num_nodes(); ++v)
    by_class[static_cast<std::size_t>(g.labels()[v])].push_back(v);

  NodeSplit split;
  split.ind_rate = ind_rate;
  std::vector<char> taken(g.num_nodes(), 0);
  for (std::size_t k = 0; k < by_class.size(); ++k) {
    auto& members = by_class[k];
    if (members.size() < labels_per_class)
      throw InsufficientLabelsError("class " + std::to_string(k) + " has " +
                                    std::to_string(members.size()) + " nodes, need " +
                                    std::to_string(labels_per_class));
    std::shuffle(members.begin(), members.end(), rng);
    for (std::size_t i = 0; i < labels_per_class; ++i) {
      split.labeled.push_back(members[i]);
      taken[members[i]] = 1;
    }
  }
  std::vector<NodeId> rest;
  for (NodeId v = 0; v < g.num_nodes(); ++v)
    if (!taken[v]) rest.push_back(v);
  std::shuffle(rest.begin(), rest.end(), rng);

  const auto n_val = static_cast<std::size_t>(std::llround(val_fraction * static_cast<double>(rest.size())));
  const std::size_t n_test = rest.size() - n_val;
  const auto n_ind = static_cast<std::size_t>(std::llround(ind_rate * static_cast<double>(n_test)));
  split.val.assign(rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(n_val));
  split.test_ind.assign(rest.begin() + static_cast<std::ptrdiff_t>(n_val),
                        rest.begin() + static_cast<std::ptrdiff_t>(n_val + n_ind));
  split.test_obs.assign(rest.begin() + static_cast<std::ptrdiff_t>(n_val + n_ind), rest.end());
  for (auto* set : {&split.labeled, &split.val, &split.test_obs, &split.test_ind})
    std::sort(set->begin(), set->end());
  return split;
}

std::vector<NodeId> SubgraphPair::to_obs(std::span<const NodeId> global) const {
  std::vector<NodeId> out;
  out.reserve(global.size());
  for (NodeId v : global) {
    if (v >= global_to_obs.size() || global_to_obs[v] == npos)
      throw ProtocolError("node " + std::to_string(v) + " is not part of the observed graph");
    out.push_back(global_to_obs[v]);
  }
  return out;
}

SubgraphPair partition_inductive(const Graph& g, const NodeSplit& split) {
  split.validate(g.num_nodes());
  std::vector<char> inductive(g.num_nodes(), 0);
  for (NodeId v : split.test_ind) inductive[v] = 1;

  SubgraphPair pair;
  pair.global_to_obs.assign(g.num_nodes(), SubgraphPair::npos);
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    if (inductive[v]) {
      pair.ind_to_global.push_back(v);
    } else {
      pair.global_to_obs[v] = pair.obs_to_global.size();
      pair.obs_to_global.push_back(v);
    }
  }
  pair.g_obs = induced_subgraph(g, pair.obs_to_global);
  pair.g_ind = induced_subgraph(g, pair.ind_to_global);
  return pair;
}

void save_split(const NodeSplit& split, const std::filesystem::path& path) {
  nlohmann::json j{{"labeled", split.labeled},
                   {"val", split.val},
                   {"test_obs", split.test_obs},
                   {"test_ind", split.test_ind},
                   {"ind_rate", split.ind_rate}};
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(1) << '\n';
}

NodeSplit load_split(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
    NodeSplit s;
    j.at("labeled").get_to(s.labeled);
    j.at("val").get_to(s.val);
    j.at("test_obs").get_to(s.test_obs);
    j.at("test_ind").get_to(s.test_ind);
    if (j.contains("ind_rate")) {
      s.ind_rate = j.at("ind_rate").get<double>();
    } else {
      const double t = static_cast<double>(s.test_size());
      s.ind_rate = t > 0 ? static_cast<double>(s.test_ind.size()) / t : 0.0;
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw MalformedDatasetError(path.string() + ": " + e.what());
  }
}

}  // namespace glnn
