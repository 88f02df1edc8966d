#include "glnn/gnn.hpp"

#include <cmath>
#include <string>

#include "glnn/error.hpp"

namespace glnn {

Tensor gcn_aggregate(const Graph& g, const Tensor& h, std::span<const std::size_t> degrees) {
  if (h.rows() != g.num_nodes())
    throw ShapeError("gcn_aggregate: " + std::to_string(h.rows()) + " rows for " +
                     std::to_string(g.num_nodes()) + " nodes");
  if (!degrees.empty() && degrees.size() != g.num_nodes())
    throw ShapeError("gcn_aggregate: degree override has the wrong length");
  const std::size_t n = g.num_nodes();
  std::vector<double> inv_sqrt(n);
  for (NodeId v = 0; v < n; ++v) {
    const std::size_t d = degrees.empty() ? g.degree(v) : degrees[v];
    inv_sqrt[v] = 1.0 / std::sqrt(static_cast<double>(d + 1));
  }
  Tensor out(n, h.cols());
  const std::size_t c = h.cols();
  for (NodeId v = 0; v < n; ++v) {
    double* o = out.row(v).data();
    const double self = inv_sqrt[v] * inv_sqrt[v];
    const double* hv = h.row(v).data();
    for (std::size_t j = 0; j < c; ++j) o[j] = self * hv[j];
    for (NodeId u : g.neighbors(v)) {
      const double w = inv_sqrt[v] * inv_sqrt[u];
      const double* hu = h.row(u).data();
      for (std::size_t j = 0; j < c; ++j) o[j] += w * hu[j];
    }
  }
  return out;
}

// ---- SAGE -------------------------------------------------------------------

SageParams SageParams::init(std::size_t in_dim, std::size_t hidden_dim, std::size_t out_dim,
                            std::size_t num_layers, double dropout_rate, Rng& rng) {
  if (num_layers == 0) throw DomainError("SAGE needs at least one layer");
  SageParams p;
  p.hidden_dim = hidden_dim;
  p.dropout_rate = dropout_rate;
  for (std::size_t l = 0; l < num_layers; ++l) {
    const std::size_t in = l == 0 ? in_dim : hidden_dim;
    const std::size_t out = l + 1 == num_layers ? out_dim : hidden_dim;
    p.layers.push_back(Linear::init(in, out, rng));
  }
  p.validate();
  return p;
}

std::vector<Tensor*> SageParams::parameters() {
  std::vector<Tensor*> out;
  for (auto& l : layers) {
    out.push_back(&l.weight);
    out.push_back(&l.bias);
  }
  return out;
}

void SageParams::zero_grad() {
  for (Tensor* t : parameters()) t->zero_grad();
}

void SageParams::validate() const {
  if (layers.empty()) throw ShapeError("SAGE has no layers");
  for (std::size_t l = 1; l < layers.size(); ++l)
    if (layers[l - 1].out_dim() != layers[l].in_dim())
      throw ShapeError("SAGE layer " + std::to_string(l) + " input does not chain");
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) throw DomainError("dropout_rate outside [0, 1)");
}

namespace {

bool aggregate_first(const Linear& layer) { return layer.in_dim() <= layer.out_dim(); }

/// A_hat H W + b, choosing the cheaper association.
Tensor propagate_linear(const Linear& layer, const Graph& g, const Tensor& h,
                        std::span<const std::size_t> degrees, Tensor* aggregated) {
  if (h.cols() != layer.in_dim())
    throw ShapeError("SAGE layer expects " + std::to_string(layer.in_dim()) + " columns, got " +
                     std::to_string(h.cols()));
  Tensor z;
  if (aggregate_first(layer)) {
    Tensor agg = gcn_aggregate(g, h, degrees);
    z = matmul(agg, layer.weight);
    if (aggregated) *aggregated = std::move(agg);
  } else {
    z = gcn_aggregate(g, matmul(h, layer.weight), degrees);
  }
  add_row_vector(z, layer.bias.data());
  return z;
}

}  // namespace

Tensor sage_forward(const SageParams& p, const Graph& g, std::span<const std::size_t> degrees) {
  return sage_forward(p, g, g.features(), degrees);
}

Tensor sage_forward(const SageParams& p, const Graph& g, const Tensor& features,
                    std::span<const std::size_t> degrees) {
  p.validate();
  Tensor h = propagate_linear(p.layers[0], g, features, degrees, nullptr);
  for (std::size_t l = 1; l < p.layers.size(); ++l) {
    for (double& v : h.data())
      if (v < 0.0) v = 0.0;
    h = propagate_linear(p.layers[l], g, h, degrees, nullptr);
  }
  return h;
}

Tensor sage_forward_train(SageParams& p, const Graph& g, Rng& rng, SageCache* cache) {
  p.validate();
  SageCache local;
  SageCache& c = cache ? *cache : local;
  c = SageCache{};
  const std::size_t L = p.layers.size();
  c.aggregated.resize(L);
  c.pre.resize(L);
  c.dropout.resize(L);
  Tensor h = g.features().detached();
  for (std::size_t l = 0; l < L; ++l) {
    c.inputs.push_back(h);
    h = propagate_linear(p.layers[l], g, h, {}, &c.aggregated[l]);
    if (l + 1 == L) break;
    c.pre[l] = h;
    for (double& v : h.data())
      if (v < 0.0) v = 0.0;
    if (p.dropout_rate > 0.0) {
      c.dropout[l] = dropout_mask(h.size(), p.dropout_rate, rng);
      auto hd = h.data();
      for (std::size_t i = 0; i < hd.size(); ++i) hd[i] *= c.dropout[l][i];
    }
  }
  return h;
}

void sage_backward(SageParams& p, const Graph& g, const SageCache& cache, const Tensor& dlogits) {
  const std::size_t L = p.layers.size();
  if (cache.inputs.size() != L) throw ProtocolError("sage_backward without a matching forward cache");
  Tensor d = dlogits.detached();
  for (std::size_t l = L; l-- > 0;) {
    if (l + 1 < L) {
      auto dd = d.data();
      if (!cache.dropout[l].empty())
        for (std::size_t i = 0; i < dd.size(); ++i) dd[i] *= cache.dropout[l][i];
      auto pre = cache.pre[l].data();
      for (std::size_t i = 0; i < dd.size(); ++i)
        if (pre[i] <= 0.0) dd[i] = 0.0;
    }
    Linear& layer = p.layers[l];
    axpy(layer.bias.grad(), column_sums(d));
    const bool need_dx = l > 0;
    // A_hat is symmetric, so its adjoint is itself.
    if (aggregate_first(layer)) {
      axpy(layer.weight.grad(), matmul_tn(cache.aggregated[l], d).data());
      if (need_dx) d = gcn_aggregate(g, matmul_nt(d, layer.weight));
    } else {
      Tensor dp = gcn_aggregate(g, d);
      axpy(layer.weight.grad(), matmul_tn(cache.inputs[l], dp).data());
      if (need_dx) d = matmul_nt(dp, layer.weight);
    }
  }
}

// ---- APPNP --------------------------------------------------------------------

void AppnpParams::validate() const {
  predictor.validate();
  if (power_iterations < 1) throw DomainError("APPNP needs at least one power iteration");
  if (!(teleport >= 0.0 && teleport <= 1.0)) throw DomainError("APPNP teleport must lie in [0, 1]");
}

namespace {

Tensor appnp_propagate(const AppnpParams& p, const Graph& g, const Tensor& z0,
                       std::span<const std::size_t> degrees) {
  Tensor z = z0.detached();
  const double a = p.teleport;
  for (int t = 0; t < p.power_iterations; ++t) {
    Tensor next = gcn_aggregate(g, z, degrees);
    auto nd = next.data();
    auto base = z0.data();
    for (std::size_t i = 0; i < nd.size(); ++i) nd[i] = (1.0 - a) * nd[i] + a * base[i];
    z = std::move(next);
  }
  return z;
}

}  // namespace

Tensor appnp_forward(const AppnpParams& p, const Graph& g, std::span<const std::size_t> degrees) {
  return appnp_forward(p, g, g.features(), degrees);
}

Tensor appnp_forward(const AppnpParams& p, const Graph& g, const Tensor& features,
                     std::span<const std::size_t> degrees) {
  p.validate();
  return appnp_propagate(p, g, mlp_forward(p.predictor, features), degrees);
}

Tensor appnp_forward_train(AppnpParams& p, const Graph& g, Rng& rng, AppnpCache* cache) {
  p.validate();
  AppnpCache local;
  AppnpCache& c = cache ? *cache : local;
  Tensor z0 = mlp_forward_train(p.predictor, g.features(), rng, &c.mlp);
  return appnp_propagate(p, g, z0, {});
}

void appnp_backward(AppnpParams& p, const Graph& g, const AppnpCache& cache, const Tensor& dlogits) {
  // Z_T = ((1-a) A)^T Z_0 + a * sum_{t<T} ((1-a) A)^t Z_0
  const double a = p.teleport;
  Tensor grad = dlogits.detached();
  Tensor teleport_acc(grad.rows(), grad.cols());
  for (int t = 0; t < p.power_iterations; ++t) {
    axpy(teleport_acc.data(), grad.data(), a);
    grad = gcn_aggregate(g, grad);
    for (double& v : grad.data()) v *= (1.0 - a);
  }
  axpy(grad.data(), teleport_acc.data());
  mlp_backward(p.predictor, cache.mlp, grad);
}

}  // namespace glnn
