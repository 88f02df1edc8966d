#include "glnn/optim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "glnn/error.hpp"
#include "glnn/rng.hpp"

namespace glnn {

Adam::Adam(std::vector<Tensor*> params, AdamOptions opts) : params_(std::move(params)), opts_(opts) {
  for (Tensor* p : params_) {
    m_.emplace_back(p->size(), 0.0);
    v_.emplace_back(p->size(), 0.0);
  }
}

void Adam::step() {
  ++step_;
  const double t = static_cast<double>(step_);
  const double bc1 = 1.0 - std::pow(opts_.beta1, t);
  const double bc2 = 1.0 - std::pow(opts_.beta2, t);
  const double decay = 1.0 - opts_.lr * opts_.weight_decay;
  for (std::size_t i = 0; i < params_.size(); ++i) {
    Tensor& p = *params_[i];
    auto w = p.data();
    auto g = p.grad();
    auto& m = m_[i];
    auto& v = v_[i];
    if (m.size() != w.size()) throw ShapeError("parameter resized after optimizer creation");
    for (std::size_t j = 0; j < w.size(); ++j) {
      m[j] = opts_.beta1 * m[j] + (1.0 - opts_.beta1) * g[j];
      v[j] = opts_.beta2 * v[j] + (1.0 - opts_.beta2) * g[j] * g[j];
      const double mhat = m[j] / bc1;
      const double vhat = v[j] / bc2;
      if (opts_.weight_decay != 0.0) w[j] *= decay;
      w[j] -= opts_.lr * mhat / (std::sqrt(vhat) + opts_.eps);
    }
  }
}

GradCheckResult grad_check(const LossClosure& loss, std::span<Tensor* const> params,
                           const GradCheckOptions& opts) {
  loss(true);
  struct Coord {
    std::size_t param, index;
    double analytic;
  };
  std::vector<Coord> coords;
  for (std::size_t p = 0; p < params.size(); ++p) {
    auto g = std::as_const(*params[p]).grad();
    for (std::size_t i = 0; i < g.size(); ++i) coords.push_back({p, i, g[i]});
  }
  if (coords.size() > opts.samples) {
    Rng rng(opts.seed);
    std::shuffle(coords.begin(), coords.end(), rng);
    coords.resize(opts.samples);
  }
  GradCheckResult result;
  for (const Coord& c : coords) {
    double& x = params[c.param]->data()[c.index];
    const double saved = x;
    x = saved + opts.h;
    const double up = loss(false);
    x = saved - opts.h;
    const double down = loss(false);
    x = saved;
    const double numeric = (up - down) / (2.0 * opts.h);
    const double denom = std::max(std::abs(c.analytic) + std::abs(numeric), opts.floor);
    result.max_rel_error = std::max(result.max_rel_error, std::abs(c.analytic - numeric) / denom);
    ++result.coords_checked;
  }
  return result;
}

}  // namespace glnn
