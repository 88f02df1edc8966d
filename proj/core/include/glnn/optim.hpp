#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "glnn/tensor.hpp"

namespace glnn {

struct AdamOptions {
  double lr = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;
};

/// Bias-corrected Adam with decoupled weight decay: each step first scales
/// parameters by (1 - lr * weight_decay), then applies the Adam delta.
class Adam {
 public:
  Adam(std::vector<Tensor*> params, AdamOptions opts);

  /// One update from the gradients currently stored in the parameters.
  void step();
  std::uint64_t step_count() const noexcept { return step_; }
  const AdamOptions& options() const noexcept { return opts_; }

 private:
  std::vector<Tensor*> params_;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
  AdamOptions opts_;
  std::uint64_t step_ = 0;
};

struct GradCheckOptions {
  double h = 1e-4;
  /// Coordinates sampled; every coordinate is checked when there are fewer.
  std::size_t samples = 200;
  std::uint64_t seed = 0;
  /// Denominator floor of the relative error.
  double floor = 1e-6;
};

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t coords_checked = 0;
};

/// Loss closure for grad_check. With `want_grads` the closure must zero and
/// fill the gradients of every checked parameter; either way it returns the
/// loss. It must be deterministic.
using LossClosure = std::function<double(bool want_grads)>;

/// Compares analytic gradients against central differences
/// (f(x+h) - f(x-h)) / 2h on a random subsample of coordinates. The
/// relative error of a coordinate is |a - n| / max(|a| + |n|, floor).
GradCheckResult grad_check(const LossClosure& loss, std::span<Tensor* const> params,
                           const GradCheckOptions& opts = {});

}  // namespace glnn
