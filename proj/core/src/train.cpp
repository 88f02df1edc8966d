#include "glnn/train.hpp"

#include <cmath>
#include <string>

#include "glnn/error.hpp"

namespace glnn {

std::vector<Tensor*> parameters(Model& m) {
  return std::visit(
      [](auto& p) -> std::vector<Tensor*> {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, AppnpParams>) return p.predictor.parameters();
        else return p.parameters();
      },
      m.params);
}

void zero_grad(Model& m) {
  for (Tensor* t : parameters(m)) t->zero_grad();
}

Tensor forward_train(Model& m, const Graph& g, Rng& dropout_rng, ForwardCache& cache) {
  return std::visit(
      [&](auto& p) -> Tensor {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, MlpParams>) {
          auto& c = cache.emplace<MlpCache>();
          return mlp_forward_train(p, g.features(), dropout_rng, &c);
        } else if constexpr (std::is_same_v<T, SageParams>) {
          auto& c = cache.emplace<SageCache>();
          return sage_forward_train(p, g, dropout_rng, &c);
        } else {
          auto& c = cache.emplace<AppnpCache>();
          return appnp_forward_train(p, g, dropout_rng, &c);
        }
      },
      m.params);
}

void backward(Model& m, const Graph& g, const ForwardCache& cache, const Tensor& dlogits) {
  std::visit(
      [&](auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, MlpParams>) {
          mlp_backward(p, std::get<MlpCache>(cache), dlogits);
        } else if constexpr (std::is_same_v<T, SageParams>) {
          sage_backward(p, g, std::get<SageCache>(cache), dlogits);
        } else {
          appnp_backward(p, g, std::get<AppnpCache>(cache), dlogits);
        }
      },
      m.params);
}

TrainTrace fit(Model& m, const Graph& g, const Objective& objective, const Validator& validator,
               const FitOptions& opts, Rng& dropout_rng) {
  if (opts.max_epochs < 1) throw DomainError("max_epochs must be positive");
  if (opts.patience < 1) throw DomainError("patience must be positive");
  TrainTrace trace;
  Adam adam(parameters(m), opts.adam);
  ModelParams best = m.params;
  ForwardCache cache;
  for (int epoch = 0; epoch < opts.max_epochs; ++epoch) {
    zero_grad(m);
    const Tensor logits = forward_train(m, g, dropout_rng, cache);
    const LossValue loss = objective(logits);
    if (!std::isfinite(loss.value))
      throw TrainingDivergedError("loss became non-finite at epoch " + std::to_string(epoch), epoch);
    trace.loss.push_back(loss.value);
    backward(m, g, cache, loss.grad);
    adam.step();
    for (Tensor* t : parameters(m))
      if (!all_finite(t->data()))
        throw TrainingDivergedError("parameters became non-finite at epoch " + std::to_string(epoch), epoch);

    const double val = validator(m);
    trace.val_acc.push_back(val);
    if (trace.best_epoch < 0 || val >= trace.best_val_acc) {
      trace.best_epoch = epoch;
      trace.best_val_acc = val;
      best = m.params;
    } else if (epoch - trace.best_epoch >= opts.patience) {
      break;
    }
  }
  m.params = std::move(best);
  m.trained = true;
  return trace;
}

}  // namespace glnn
