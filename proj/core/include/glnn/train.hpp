#pragma once

#include <functional>
#include <variant>
#include <vector>

#include "glnn/loss.hpp"
#include "glnn/model.hpp"
#include "glnn/optim.hpp"

namespace glnn {

using ForwardCache = std::variant<MlpCache, SageCache, AppnpCache>;

std::vector<Tensor*> parameters(Model& m);
void zero_grad(Model& m);

/// Train-mode logits for every node of g. MLP models only read g.features().
Tensor forward_train(Model& m, const Graph& g, Rng& dropout_rng, ForwardCache& cache);
/// Accumulates parameter gradients for dlogits (shape of the logits).
void backward(Model& m, const Graph& g, const ForwardCache& cache, const Tensor& dlogits);

struct FitOptions {
  AdamOptions adam;
  int max_epochs = 500;
  /// Stop after this many epochs without a validation improvement.
  int patience = 50;
};

struct TrainTrace {
  std::vector<double> loss;     // training objective per epoch
  std::vector<double> val_acc;  // eval-mode validation accuracy after each step
  int best_epoch = -1;
  double best_val_acc = 0.0;
};

/// Training objective on the train-mode logits of every node.
using Objective = std::function<LossValue(const Tensor& logits)>;
/// Validation score of the model in eval mode; higher is better.
using Validator = std::function<double(const Model& m)>;

/// Full-batch Adam training with best-validation checkpointing. Each epoch:
/// train-mode forward, objective, backward, step, then validate. The model
/// is left at the parameters of the best epoch (ties go to the later epoch,
/// so training continues while the score plateaus) and marked trained.
/// Throws TrainingDivergedError when the objective or a parameter becomes
/// non-finite.
TrainTrace fit(Model& m, const Graph& g, const Objective& objective, const Validator& validator,
               const FitOptions& opts, Rng& dropout_rng);

}  // namespace glnn
