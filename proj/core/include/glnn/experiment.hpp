#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "glnn/distill.hpp"

namespace glnn {

/// One teacher / MLP / GLNN comparison on a fixed graph.
struct ExperimentSpec {
  TeacherHparams teacher;
  DistillConfig student;
  /// Student depth and width default to the teacher's (same parameter
  /// budget); set to override.
  std::optional<std::size_t> student_layers;
  std::optional<std::size_t> student_hidden;
  Setting setting = Setting::transductive;
  /// Fraction of the test set held out as inductive nodes (ind setting only).
  double ind_rate = 0.2;
  std::size_t labels_per_class = 20;
  double val_fraction = 0.1;
  /// Feature noise level; features become (1 - a) X + a * eps.
  double noise_alpha = 0.0;

  /// The student config with setting and inherited sizes filled in.
  DistillConfig resolved_student() const;
};

struct PipelineResult {
  NodeSplit split;
  TrainedTeacher teacher;
  StudentResult mlp;
  StudentResult glnn;
  EvalReport teacher_eval;
  EvalReport mlp_eval;
  EvalReport glnn_eval;
};

/// Noise (substream "noise"), split ("split"), teacher, plain MLP and GLNN,
/// all derived from `seed`.
PipelineResult run_pipeline(const Graph& g, const ExperimentSpec& spec, std::uint64_t seed);

/// The graph a pipeline with this spec and seed trains on (noise applied).
Graph experiment_graph(const Graph& g, const ExperimentSpec& spec, std::uint64_t seed);
/// The split a pipeline with this spec and seed uses.
NodeSplit experiment_split(const Graph& g, const ExperimentSpec& spec, std::uint64_t seed);

enum class AblationAxis { noise, split_rate, teacher };
const char* to_string(AblationAxis a) noexcept;
/// Throws DomainError for an unknown axis name.
AblationAxis parse_axis(std::string_view text);

struct AblationRow {
  std::string axis;
  std::string value;
  std::uint64_t seed = 0;
  std::string model;  // teacher architecture, "mlp" or "glnn"
  EvalReport report;
};

struct AblationOptions {
  /// Split-rate axis covers 0.1..0.9 instead of 0.1..0.5.
  bool extended_split = false;
};

/// Axis values: noise 0, 0.1, ..., 1.0; split_rate 0.1, ..., 0.5 (inductive
/// setting); teacher sage, gcn, appnp with their published hyperparameters.
std::vector<std::string> axis_values(AblationAxis axis, const AblationOptions& opts = {});

/// One row per (axis value, seed, model).
std::vector<AblationRow> run_ablation(const Graph& g, const ExperimentSpec& base, AblationAxis axis,
                                      std::span<const std::uint64_t> seeds, const AblationOptions& opts = {});

/// CSV: axis,value,seed,model,setting,acc_tran,acc_ind,acc_prod,cut_loss
void write_ablation_csv(std::span<const AblationRow> rows, const std::filesystem::path& path);

}  // namespace glnn
