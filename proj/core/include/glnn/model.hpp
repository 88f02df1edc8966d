#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <variant>

#include "glnn/gnn.hpp"
#include "glnn/mlp.hpp"
#include "glnn/split.hpp"

namespace glnn {

enum class Arch { mlp, sage, gcn, appnp };

const char* to_string(Arch a) noexcept;
Arch parse_arch(std::string_view text);
/// True for message-passing architectures.
bool uses_graph(Arch a) noexcept;

using ModelParams = std::variant<MlpParams, SageParams, AppnpParams>;

/// A parameterised model plus the protocol facts needed to use it safely:
/// which setting it was trained under and whether it was trained at all.
struct Model {
  Arch arch = Arch::mlp;
  ModelParams params;
  Setting setting = Setting::transductive;
  bool trained = false;
  /// Free-form tag for reports: "teacher", "mlp", "glnn", ...
  std::string role;

  /// Hops of neighbourhood one prediction depends on (0 for MLPs).
  int receptive_field() const;
  std::size_t num_classes() const;
};

/// Eval-mode logits for every node. MLP models only read g.features(), so
/// they run on graphs built with Graph::features_only.
Tensor predict_logits(const Model& m, const Graph& g);

/// Eval-mode logits with explicit features and an optional degree override
/// (see gcn_aggregate).
Tensor predict_logits(const Model& m, const Graph& g, const Tensor& features,
                      std::span<const std::size_t> degrees);

/// JSON checkpoint. Doubles are written in shortest round-trip form, so
/// save/load reproduces every parameter bit for bit.
///
///   {"format": "glnn-checkpoint", "version": 1, "arch": "sage",
///    "role": "teacher", "setting": "tran", "trained": true,
///    "config": {...}, "tensors": [{"name", "rows", "cols", "data"}]}
std::string checkpoint_to_string(const Model& m);
Model checkpoint_from_string(std::string_view text);
void save_checkpoint(const Model& m, const std::filesystem::path& path);
Model load_checkpoint(const std::filesystem::path& path);

}  // namespace glnn
