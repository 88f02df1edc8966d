#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "config.hpp"

namespace glnn::cli {

enum ExitCode : int { kSuccess = 0, kUsage = 1, kRuntime = 2 };

/// Command-line values that take precedence over the config file.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> setting;
  std::optional<double> ind_rate;
  std::optional<double> lambda;
  std::optional<std::size_t> width_mult;
  std::optional<std::string> output_dir;
};

/// Throws ConfigError when an override is invalid.
void apply_overrides(ExperimentConfig& cfg, const Overrides& o);

// Each command writes under cfg.output_root() and logs progress to `log`.
//
//   <root>/seed<k>/split.json              train-teacher
//   <root>/seed<k>/teacher.ckpt.json       train-teacher
//   <root>/seed<k>/teacher_report.json     train-teacher
//   <root>/seed<k>/teacher_trace.csv       train-teacher
//   <root>/seed<k>/soft_targets.csv        train-teacher
//   <root>/seed<k>/{glnn,mlp}.ckpt.json    distill
//   <root>/seed<k>/{glnn,mlp}_report.json  distill
//   <root>/seed<k>/eval.json               eval
//   <root>/eval_metrics.csv                eval
//   <root>/bench.csv, bench_*.svg          bench
//   <root>/fetch_curve.csv                 bench
//   <root>/ablation_<axis>.csv             ablate
void cmd_train_teacher(const ExperimentConfig& cfg, std::ostream& log);
void cmd_distill(const ExperimentConfig& cfg, std::ostream& log);
void cmd_eval(const ExperimentConfig& cfg, std::ostream& log);
void cmd_bench(const ExperimentConfig& cfg, std::ostream& log);
void cmd_ablate(const ExperimentConfig& cfg, AblationAxis axis, std::ostream& log);

/// Full command line; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace glnn::cli
