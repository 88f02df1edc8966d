#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "glnn/bench.hpp"
#include "glnn/dataset.hpp"
#include "glnn/error.hpp"
#include "glnn/experiment.hpp"

namespace glnn::cli {

/// Malformed configuration; the message names the file, line and field.
class ConfigError : public Error {
 public:
  using Error::Error;
};

struct DatasetSource {
  std::string name = "sbm";
  /// Directory holding edges.txt, features.csv and labels.txt.
  std::optional<std::filesystem::path> path;
  /// Used when `path` is empty.
  SbmConfig sbm;

  Graph load() const;
};

struct BenchConfig {
  std::size_t nodes = 10;
  int repetitions = 5;
  int warmups = 2;
  std::optional<std::size_t> fanout;
  std::vector<int> layers{1, 2, 3};
  std::vector<std::size_t> width_mults{1};
  /// Graph the latency runs are measured on; defaults to the training graph.
  std::optional<DatasetSource> graph;
  int fetch_curve_max_layers = 4;
  FetchCostModel cost;
  bool svg = true;
};

struct ExperimentConfig {
  DatasetSource dataset;
  ExperimentSpec spec;
  std::vector<std::uint64_t> seeds{0};
  std::filesystem::path output_dir = "runs";
  BenchConfig bench;
  AblationOptions ablation;

  void validate() const;
  /// output_dir, resolved under $GLNN_OUTPUT_ROOT when it is relative and
  /// the variable is set.
  std::filesystem::path output_root() const;
  std::filesystem::path seed_dir(std::uint64_t seed) const;
};

/// Parses the YAML schema documented in the README. Unknown keys are
/// rejected. Throws ConfigError.
ExperimentConfig parse_config(const std::string& text, const std::string& source_name = "<config>");
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace glnn::cli
