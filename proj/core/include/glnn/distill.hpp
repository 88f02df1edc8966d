#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "glnn/loss.hpp"
#include "glnn/teacher.hpp"

namespace glnn {

struct StudentHparams {
  std::size_t num_layers = 2;
  std::size_t hidden_dim = 128;
  double lr = 0.01;
  double weight_decay = 0.002;
  double dropout = 0.1;
  Norm norm = Norm::none;
  int max_epochs = 500;
  int patience = 50;

  void validate() const;
};

struct DistillConfig {
  /// Weight of the label term; the soft-target term gets 1 - lambda.
  double lambda = 0.0;
  Setting setting = Setting::transductive;
  /// Hidden widths are hidden_dim * width_mult; input and output are fixed.
  std::size_t width_mult = 1;
  StudentHparams student;
  KlDirection kl_direction = KlDirection::target_to_student;
  /// Grid-search lr, weight decay and dropout on validation accuracy.
  bool search = false;

  void validate() const;
};

/// lambda * CE(labeled) + (1 - lambda) * KL(targets || student) over
/// `distill_rows`, each term averaged over its own set. targets.row(i) is the
/// target of logits row distill_rows[i]. A term whose weight is zero is not
/// evaluated, so lambda = 1 and lambda = 0 reproduce the single losses
/// exactly.
LossValue distill_objective(const Tensor& logits, std::span<const NodeId> labeled,
                            std::span<const Label> labels, std::span<const NodeId> distill_rows,
                            const Tensor& targets, double lambda,
                            KlDirection direction = KlDirection::target_to_student);

/// Same, looking the targets up in `z` by logits row id. Throws
/// MissingTargetError for a distillation node that has no target.
LossValue distill_objective(const Tensor& logits, std::span<const NodeId> labeled,
                            std::span<const Label> labels, std::span<const NodeId> distill_rows,
                            const SoftTargets& z, double lambda,
                            KlDirection direction = KlDirection::target_to_student);

/// What a student may see under a setting: the features and labels of the
/// visible nodes, with no adjacency at all. In the transductive setting
/// every node is visible; in the inductive setting only V minus V^U_ind.
struct StudentView {
  Graph visible;                  // features-only graph
  std::vector<NodeId> to_global;  // local id -> global id
  std::vector<NodeId> labeled;    // local ids
  std::vector<Label> labeled_y;
  std::vector<NodeId> val;        // local ids
  /// Soft-target set: every visible node.
  std::vector<NodeId> distill;    // local ids
};

StudentView make_student_view(const Graph& g, const NodeSplit& split, Setting setting);

/// Nodes a teacher labels with soft targets under `setting`, as global ids:
/// all of V (tran) or V^L + val + V^U_obs (ind).
std::vector<NodeId> distillation_nodes(const Graph& g, const NodeSplit& split, Setting setting);

struct StudentResult {
  Model model;
  TrainTrace trace;
  StudentHparams chosen;  // hyperparameters of the returned model
};

/// Trains a GLNN student against given soft targets (keyed by global id).
/// Randomness: "student/init" and "student/dropout".
StudentResult train_glnn(const Graph& g, const NodeSplit& split, const SoftTargets& z,
                         const DistillConfig& cfg, const SeedStream& seeds);

/// Generates soft targets with `teacher` and trains a GLNN on them. The
/// teacher must be trained and must share cfg.setting (ProtocolError).
StudentResult train_glnn(const Model& teacher, const Graph& g, const NodeSplit& split,
                         const DistillConfig& cfg, const SeedStream& seeds);

/// Teacher soft targets for the setting's distillation set. Inductive
/// targets come from the teacher run on the observed subgraph only.
SoftTargets teacher_soft_targets(const Model& teacher, const Graph& g, const NodeSplit& split,
                                 Setting setting);

/// Cross-entropy on V^L only, over the same visible rows and random
/// substreams as train_glnn, so lambda = 1 reproduces it bit for bit.
StudentResult train_plain_mlp(const Graph& g, const NodeSplit& split, const DistillConfig& cfg,
                              const SeedStream& seeds);

double production_accuracy(double acc_ind, double acc_tran, double ind_rate);

struct EvalReport {
  std::string arch;
  std::string role;
  Setting setting = Setting::transductive;
  std::uint64_t seed = 0;
  double acc_tran = 0.0;
  std::optional<double> acc_ind;
  double acc_prod = 0.0;
  double ind_rate = 0.0;
  std::optional<double> cut_loss;
  double train_time_s = 0.0;

  /// {arch, role, setting, seed, acc_tran, acc_ind, acc_prod, ind_rate,
  ///  cut_loss, train_time_s}; absent optionals are null.
  std::string to_json(bool include_timing = true) const;
  static EvalReport from_json(std::string_view text);
};

/// Transductive: accuracy over the whole test set on the full graph; prod
/// equals tran. Inductive: tran on V^U_obs with the model run on the
/// observed subgraph, ind on V^U_ind with the model run on the full graph
/// (new nodes arrive with their edges), prod interpolated at split.ind_rate.
/// cut_loss uses eval-mode predictions on every node of g. Throws
/// ProtocolError for an untrained model or a setting mismatch and
/// DomainError for an empty evaluation set.
EvalReport evaluate(const Model& m, const Graph& g, const NodeSplit& split, Setting setting);

}  // namespace glnn
