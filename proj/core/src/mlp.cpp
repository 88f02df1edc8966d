#include "glnn/mlp.hpp"

#include <cmath>
#include <string>

#include "glnn/error.hpp"

namespace glnn {

Linear Linear::init(std::size_t in, std::size_t out, Rng& rng) {
  return Linear{glorot_uniform(in, out, rng), Tensor(1, out)};
}

Tensor linear_forward(const Linear& layer, const Tensor& x) {
  if (x.cols() != layer.in_dim())
    throw ShapeError("linear layer expects " + std::to_string(layer.in_dim()) +
                     " input columns, got " + std::to_string(x.cols()));
  Tensor y = matmul(x, layer.weight);
  add_row_vector(y, layer.bias.data());
  return y;
}

Tensor linear_backward(Linear& layer, const Tensor& x, const Tensor& dy, bool want_dx) {
  const Tensor dw = matmul_tn(x, dy);
  axpy(layer.weight.grad(), dw.data());
  const auto db = column_sums(dy);
  axpy(layer.bias.grad(), db);
  if (!want_dx) return {};
  return matmul_nt(dy, layer.weight);
}

BatchNorm BatchNorm::init(std::size_t dim) {
  BatchNorm bn;
  bn.gamma = Tensor(1, dim, 1.0);
  bn.beta = Tensor(1, dim, 0.0);
  bn.running_mean.assign(dim, 0.0);
  bn.running_var.assign(dim, 1.0);
  return bn;
}

std::vector<double> dropout_mask(std::size_t size, double p, Rng& rng) {
  std::vector<double> mask(size, 1.0);
  if (p <= 0.0) return mask;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double keep_scale = 1.0 / (1.0 - p);
  for (double& m : mask) m = unif(rng) < p ? 0.0 : keep_scale;
  return mask;
}

MlpParams MlpParams::init(std::size_t in_dim, std::size_t hidden_dim, std::size_t out_dim,
                          std::size_t num_layers, double dropout_rate, Norm norm, Rng& rng) {
  if (num_layers == 0) throw DomainError("an MLP needs at least one layer");
  MlpParams p;
  p.hidden_dim = hidden_dim;
  p.dropout_rate = dropout_rate;
  p.norm = norm;
  for (std::size_t l = 0; l < num_layers; ++l) {
    const std::size_t in = l == 0 ? in_dim : hidden_dim;
    const std::size_t out = l + 1 == num_layers ? out_dim : hidden_dim;
    p.layers.push_back(Linear::init(in, out, rng));
    if (norm == Norm::batchnorm && l + 1 < num_layers) p.norms.push_back(BatchNorm::init(out));
  }
  p.validate();
  return p;
}

std::vector<Tensor*> MlpParams::parameters() {
  std::vector<Tensor*> out;
  for (auto& l : layers) {
    out.push_back(&l.weight);
    out.push_back(&l.bias);
  }
  for (auto& n : norms) {
    out.push_back(&n.gamma);
    out.push_back(&n.beta);
  }
  return out;
}

void MlpParams::zero_grad() {
  for (Tensor* t : parameters()) t->zero_grad();
}

void MlpParams::validate() const {
  if (layers.empty()) throw ShapeError("MLP has no layers");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& layer = layers[l];
    if (layer.bias.rows() != 1 || layer.bias.cols() != layer.out_dim())
      throw ShapeError("bias shape mismatch in layer " + std::to_string(l));
    if (l > 0 && layers[l - 1].out_dim() != layer.in_dim())
      throw ShapeError("layer " + std::to_string(l) + " input does not chain");
  }
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) throw DomainError("dropout_rate outside [0, 1)");
  if (norm == Norm::batchnorm && norms.size() + 1 != layers.size())
    throw ShapeError("batchnorm needs one norm per hidden layer");
}

namespace {

void batchnorm_eval(const BatchNorm& bn, Tensor& z) {
  for (std::size_t j = 0; j < z.cols(); ++j) {
    const double inv = 1.0 / std::sqrt(bn.running_var[j] + bn.eps);
    for (std::size_t i = 0; i < z.rows(); ++i)
      z(i, j) = bn.gamma(0, j) * (z(i, j) - bn.running_mean[j]) * inv + bn.beta(0, j);
  }
}

void batchnorm_train(BatchNorm& bn, Tensor& z, Tensor& xhat, std::vector<double>& inv_std) {
  const std::size_t n = z.rows();
  const std::size_t d = z.cols();
  xhat = Tensor(n, d);
  inv_std.assign(d, 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += z(i, j);
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) var += (z(i, j) - mean) * (z(i, j) - mean);
    var /= static_cast<double>(n);
    const double inv = 1.0 / std::sqrt(var + bn.eps);
    inv_std[j] = inv;
    for (std::size_t i = 0; i < n; ++i) {
      xhat(i, j) = (z(i, j) - mean) * inv;
      z(i, j) = bn.gamma(0, j) * xhat(i, j) + bn.beta(0, j);
    }
    const double unbiased = n > 1 ? var * static_cast<double>(n) / static_cast<double>(n - 1) : var;
    bn.running_mean[j] = bn.momentum * bn.running_mean[j] + (1.0 - bn.momentum) * mean;
    bn.running_var[j] = bn.momentum * bn.running_var[j] + (1.0 - bn.momentum) * unbiased;
  }
}

Tensor batchnorm_backward(BatchNorm& bn, const Tensor& xhat, const std::vector<double>& inv_std,
                          const Tensor& dy) {
  const std::size_t n = dy.rows();
  const std::size_t d = dy.cols();
  const auto nd = static_cast<double>(n);
  Tensor dz(n, d);
  auto dgamma = bn.gamma.grad();
  auto dbeta = bn.beta.grad();
  for (std::size_t j = 0; j < d; ++j) {
    double sum_dxhat = 0.0, sum_dxhat_xhat = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      dgamma[j] += dy(i, j) * xhat(i, j);
      dbeta[j] += dy(i, j);
      const double dxh = dy(i, j) * bn.gamma(0, j);
      sum_dxhat += dxh;
      sum_dxhat_xhat += dxh * xhat(i, j);
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double dxh = dy(i, j) * bn.gamma(0, j);
      dz(i, j) = inv_std[j] / nd * (nd * dxh - sum_dxhat - xhat(i, j) * sum_dxhat_xhat);
    }
  }
  return dz;
}

void relu_inplace(Tensor& t) {
  for (double& v : t.data())
    if (v < 0.0) v = 0.0;
}

}  // namespace

Tensor mlp_forward(const MlpParams& p, const Tensor& x) {
  p.validate();
  Tensor h = x.detached();
  for (std::size_t l = 0; l < p.layers.size(); ++l) {
    h = linear_forward(p.layers[l], h);
    if (l + 1 == p.layers.size()) break;
    if (p.norm == Norm::batchnorm) batchnorm_eval(p.norms[l], h);
    relu_inplace(h);
  }
  return h;
}

Tensor mlp_forward_train(MlpParams& p, const Tensor& x, Rng& rng, MlpCache* cache) {
  p.validate();
  MlpCache local;
  MlpCache& c = cache ? *cache : local;
  c = MlpCache{};
  const std::size_t hidden = p.layers.size() - 1;
  c.normalized.resize(hidden);
  c.inv_std.resize(hidden);
  c.activated.resize(hidden);
  c.dropout.resize(hidden);

  Tensor h = x.detached();
  for (std::size_t l = 0; l < p.layers.size(); ++l) {
    c.inputs.push_back(h);
    h = linear_forward(p.layers[l], h);
    if (l + 1 == p.layers.size()) break;
    if (p.norm == Norm::batchnorm) batchnorm_train(p.norms[l], h, c.normalized[l], c.inv_std[l]);
    c.activated[l] = h;
    relu_inplace(h);
    if (p.dropout_rate > 0.0) {
      c.dropout[l] = dropout_mask(h.size(), p.dropout_rate, rng);
      auto hd = h.data();
      for (std::size_t i = 0; i < hd.size(); ++i) hd[i] *= c.dropout[l][i];
    }
  }
  return h;
}

Tensor mlp_backward(MlpParams& p, const MlpCache& cache, const Tensor& dlogits, bool want_dx) {
  if (cache.inputs.size() != p.layers.size()) throw ProtocolError("mlp_backward without a matching forward cache");
  Tensor d = dlogits.detached();
  for (std::size_t l = p.layers.size(); l-- > 0;) {
    if (l + 1 < p.layers.size()) {
      auto dd = d.data();
      if (!cache.dropout[l].empty())
        for (std::size_t i = 0; i < dd.size(); ++i) dd[i] *= cache.dropout[l][i];
      auto act = cache.activated[l].data();
      for (std::size_t i = 0; i < dd.size(); ++i)
        if (act[i] <= 0.0) dd[i] = 0.0;
      if (p.norm == Norm::batchnorm)
        d = batchnorm_backward(p.norms[l], cache.normalized[l], cache.inv_std[l], d);
    }
    d = linear_backward(p.layers[l], cache.inputs[l], d, l > 0 || want_dx);
  }
  return d;
}

}  // namespace glnn
