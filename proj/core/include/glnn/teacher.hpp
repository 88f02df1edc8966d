#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "glnn/model.hpp"
#include "glnn/rng.hpp"
#include "glnn/split.hpp"
#include "glnn/train.hpp"

namespace glnn {

struct TeacherHparams {
  Arch arch = Arch::sage;
  std::size_t num_layers = 2;
  std::size_t hidden_dim = 128;
  double lr = 0.01;
  double weight_decay = 5e-4;
  double dropout = 0.0;
  int power_iterations = 10;  // APPNP only
  double teleport = 0.1;      // APPNP only
  int max_epochs = 500;
  int patience = 50;

  /// Published settings for the small citation benchmarks:
  ///   sage  2 layers, hidden 128, lr 0.01, wd 5e-4, dropout 0
  ///   gcn   2 layers, hidden 64,  lr 0.01, wd 1e-3, dropout 0.8
  ///   appnp 2 layers, hidden 64,  lr 0.01, wd 0.01, dropout 0.5, 10 iterations
  static TeacherHparams defaults(Arch arch);
  void validate() const;
};

/// Fresh, untrained parameters for `hp` on a graph with the given input and
/// class counts.
Model init_teacher(const TeacherHparams& hp, std::size_t in_dim, std::size_t num_classes, Rng& rng);

struct TrainedTeacher {
  Model model;
  TrainTrace trace;
};

/// Trains a teacher on g with cross-entropy over `labeled`, selecting the
/// epoch with the best accuracy on `val`. Both sets hold node ids of g.
/// Randomness comes from the "teacher/init" and "teacher/dropout" substreams.
TrainedTeacher fit_teacher(const Graph& g, std::span<const NodeId> labeled,
                           std::span<const NodeId> val, const TeacherHparams& hp,
                           const SeedStream& seeds);

/// Protocol-level training. In the transductive setting the teacher sees the
/// whole graph; in the inductive setting it sees only the observed subgraph
/// and every inductive node is invisible to it.
TrainedTeacher train_teacher(const Graph& g, const NodeSplit& split, Setting setting,
                             const TeacherHparams& hp, const SeedStream& seeds);

/// Teacher probabilities keyed by global node id.
struct SoftTargets {
  std::vector<NodeId> nodes;  // sorted ascending, unique
  Tensor probs;               // probs.row(i) belongs to nodes[i]

  std::size_t size() const noexcept { return nodes.size(); }
  std::size_t num_classes() const noexcept { return probs.cols(); }
  bool contains(NodeId v) const noexcept;
  /// Row index of v; MissingTargetError when absent.
  std::size_t index_of(NodeId v) const;
  /// Rows for `ids`, in that order.
  Tensor gather(std::span<const NodeId> ids) const;
  /// Sortedness, shape and probability-row checks.
  void validate() const;
};

/// Eval-mode softmax of the model on g for `nodes` (ids of g). When g is a
/// subgraph, `local_to_global` maps its ids to the keys stored in the result.
/// Throws IndexError for a node outside g.
SoftTargets predict_soft_targets(const Model& m, const Graph& g, std::span<const NodeId> nodes,
                                 std::span<const NodeId> local_to_global = {});

/// CSV with header node_id,p_0,...,p_{K-1}; values in %.17g.
void save_soft_targets(const SoftTargets& z, const std::filesystem::path& path);
SoftTargets load_soft_targets(const std::filesystem::path& path);

}  // namespace glnn
