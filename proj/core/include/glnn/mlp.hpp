#pragma once

#include <cstddef>
#include <vector>

#include "glnn/rng.hpp"
#include "glnn/tensor.hpp"

namespace glnn {

/// Fully connected layer y = x W + b, W is in x out, b is 1 x out.
struct Linear {
  Tensor weight;
  Tensor bias;

  static Linear init(std::size_t in, std::size_t out, Rng& rng);
  std::size_t in_dim() const noexcept { return weight.rows(); }
  std::size_t out_dim() const noexcept { return weight.cols(); }
};

/// Forward of a linear layer: x W + b.
Tensor linear_forward(const Linear& layer, const Tensor& x);
/// Accumulates dW, db into the layer's gradient buffers; returns dx when
/// `want_dx` (otherwise an empty tensor).
Tensor linear_backward(Linear& layer, const Tensor& x, const Tensor& dy, bool want_dx);

/// Batch normalisation over rows. Running statistics follow
/// running = momentum * running + (1 - momentum) * batch.
struct BatchNorm {
  Tensor gamma;
  Tensor beta;
  std::vector<double> running_mean;
  std::vector<double> running_var;
  double momentum = 0.9;
  double eps = 1e-5;

  static BatchNorm init(std::size_t dim);
};

enum class Norm { none, batchnorm };

/// Inverted dropout: kept units are scaled by 1/(1-p) at train time, so eval
/// mode is the identity. Returns the mask (0 or 1/(1-p) per entry).
std::vector<double> dropout_mask(std::size_t size, double p, Rng& rng);

struct MlpParams {
  std::vector<Linear> layers;
  std::vector<BatchNorm> norms;  // one per hidden layer when norm == batchnorm
  std::size_t hidden_dim = 0;
  double dropout_rate = 0.0;
  Norm norm = Norm::none;

  /// num_layers Linear layers; hidden widths are hidden_dim. A 1-layer MLP
  /// is a single linear map in_dim -> out_dim.
  static MlpParams init(std::size_t in_dim, std::size_t hidden_dim, std::size_t out_dim,
                        std::size_t num_layers, double dropout_rate, Norm norm, Rng& rng);

  std::size_t num_layers() const noexcept { return layers.size(); }
  std::size_t in_dim() const { return layers.front().in_dim(); }
  std::size_t out_dim() const { return layers.back().out_dim(); }
  std::vector<Tensor*> parameters();
  void zero_grad();
  /// Throws ShapeError when dimensions do not chain, DomainError on a bad
  /// dropout rate.
  void validate() const;
};

/// Intermediate values saved by a training forward pass for mlp_backward.
struct MlpCache {
  std::vector<Tensor> inputs;      // input of each linear layer
  std::vector<Tensor> normalized;  // batchnorm x_hat per hidden layer
  std::vector<std::vector<double>> inv_std;
  std::vector<Tensor> activated;   // post-norm pre-ReLU values per hidden layer
  std::vector<std::vector<double>> dropout;
};

/// Eval-mode forward (no dropout, running batchnorm statistics).
Tensor mlp_forward(const MlpParams& p, const Tensor& x);

/// Train-mode forward. Dropout draws from `rng`; batchnorm uses batch
/// statistics and updates the running ones. Fills `cache` when non-null.
Tensor mlp_forward_train(MlpParams& p, const Tensor& x, Rng& rng, MlpCache* cache);

/// Backpropagates dlogits through the cached pass, accumulating parameter
/// gradients. Returns dX when `want_dx`.
Tensor mlp_backward(MlpParams& p, const MlpCache& cache, const Tensor& dlogits,
                    bool want_dx = false);

}  // namespace glnn
