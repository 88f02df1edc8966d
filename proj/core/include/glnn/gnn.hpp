#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "glnn/graph.hpp"
#include "glnn/mlp.hpp"
#include "glnn/rng.hpp"
#include "glnn/tensor.hpp"

namespace glnn {

/// Symmetric-normalised aggregation with a self term:
///   H'_v = sum_{u in N(v) + {v}} H_u / sqrt((d_v + 1)(d_u + 1)).
///
/// `degrees`, when non-empty, overrides the CSR degrees used in the
/// normalisation (one entry per node). Computing on an induced subgraph with
/// the parent graph's degrees reproduces the parent's values at every node
/// whose full neighbourhood is inside the subgraph.
Tensor gcn_aggregate(const Graph& g, const Tensor& h, std::span<const std::size_t> degrees = {});

/// GraphSAGE with GCN aggregation. Layer l computes
///   H_l = ReLU(gcn_aggregate(H_{l-1}) W_l + b_l)
/// with dropout between layers and no activation after the last layer. A GCN
/// teacher uses the same parameters and forward pass.
struct SageParams {
  std::vector<Linear> layers;
  std::size_t hidden_dim = 0;
  double dropout_rate = 0.0;

  static SageParams init(std::size_t in_dim, std::size_t hidden_dim, std::size_t out_dim,
                         std::size_t num_layers, double dropout_rate, Rng& rng);
  std::size_t num_layers() const noexcept { return layers.size(); }
  std::vector<Tensor*> parameters();
  void zero_grad();
  void validate() const;
};

struct SageCache {
  std::vector<Tensor> inputs;      // H_{l-1} after dropout
  std::vector<Tensor> aggregated;  // A_hat H_{l-1}, when aggregation ran first
  std::vector<Tensor> pre;         // pre-activation of hidden layers
  std::vector<std::vector<double>> dropout;
};

/// Eval-mode forward on `features` (defaults to the graph's features).
Tensor sage_forward(const SageParams& p, const Graph& g, std::span<const std::size_t> degrees = {});
Tensor sage_forward(const SageParams& p, const Graph& g, const Tensor& features,
                    std::span<const std::size_t> degrees = {});
Tensor sage_forward_train(SageParams& p, const Graph& g, Rng& rng, SageCache* cache);
void sage_backward(SageParams& p, const Graph& g, const SageCache& cache, const Tensor& dlogits);

/// APPNP: Z_0 = MLP(X), Z_{t+1} = (1 - teleport) * gcn_aggregate(Z_t) + teleport * Z_0,
/// logits = Z_T.
struct AppnpParams {
  MlpParams predictor;
  int power_iterations = 10;
  double teleport = 0.1;

  void validate() const;
};

struct AppnpCache {
  MlpCache mlp;
};

Tensor appnp_forward(const AppnpParams& p, const Graph& g, std::span<const std::size_t> degrees = {});
Tensor appnp_forward(const AppnpParams& p, const Graph& g, const Tensor& features,
                     std::span<const std::size_t> degrees = {});
Tensor appnp_forward_train(AppnpParams& p, const Graph& g, Rng& rng, AppnpCache* cache);
void appnp_backward(AppnpParams& p, const Graph& g, const AppnpCache& cache, const Tensor& dlogits);

}  // namespace glnn
