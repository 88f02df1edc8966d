#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "glnn/graph.hpp"

namespace glnn {

enum class Setting { transductive, inductive };

const char* to_string(Setting s) noexcept;
/// Accepts "tran"/"transductive" and "ind"/"inductive".
Setting parse_setting(std::string_view text);

/// Disjoint node sets of one experimental split. All ids are global.
struct NodeSplit {
  std::vector<NodeId> labeled;   // V^L
  std::vector<NodeId> val;
  std::vector<NodeId> test_obs;  // V^U_obs
  std::vector<NodeId> test_ind;  // V^U_ind
  double ind_rate = 0.0;

  std::size_t test_size() const noexcept { return test_obs.size() + test_ind.size(); }
  /// Throws DomainError when sets overlap or reference nodes >= num_nodes.
  void validate(std::size_t num_nodes) const;
};

/// Stratified labeled set (labels_per_class per class); the remainder is
/// shuffled, val_fraction of it becomes validation and the rest test; the
/// test set is split uniformly into observed/inductive at ind_rate.
NodeSplit make_split(const Graph& g, std::size_t labels_per_class, double val_fraction,
                     double ind_rate, std::uint64_t seed);

/// The observed graph (V minus V^U_ind) and the inductive graph (V^U_ind),
/// with every edge crossing the two dropped. Local node i of g_obs is
/// obs_to_global[i]; both maps are sorted ascending.
struct SubgraphPair {
  Graph g_obs;
  Graph g_ind;
  std::vector<NodeId> obs_to_global;
  std::vector<NodeId> ind_to_global;

  /// global id -> local id in g_obs, or npos for inductive nodes.
  std::vector<std::size_t> global_to_obs;
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  std::vector<NodeId> to_obs(std::span<const NodeId> global) const;
};

SubgraphPair partition_inductive(const Graph& g, const NodeSplit& split);

// JSON record {labeled:[], val:[], test_obs:[], test_ind:[], ind_rate}
void save_split(const NodeSplit& split, const std::filesystem::path& path);
NodeSplit load_split(const std::filesystem::path& path);

}  // namespace glnn
