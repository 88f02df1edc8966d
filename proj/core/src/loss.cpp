#include "glnn/loss.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "glnn/error.hpp"

namespace glnn {

Tensor softmax_rows(const Tensor& logits) {
  Tensor out(logits.rows(), logits.cols());
  for (std::size_t i = 0; i < logits.rows(); ++i) {
    auto in = logits.row(i);
    auto o = out.row(i);
    const double m = *std::max_element(in.begin(), in.end());
    double s = 0.0;
    for (std::size_t j = 0; j < in.size(); ++j) s += (o[j] = std::exp(in[j] - m));
    for (double& v : o) v /= s;
  }
  return out;
}

Tensor log_softmax_rows(const Tensor& logits) {
  Tensor out(logits.rows(), logits.cols());
  for (std::size_t i = 0; i < logits.rows(); ++i) {
    auto in = logits.row(i);
    auto o = out.row(i);
    const double m = *std::max_element(in.begin(), in.end());
    double s = 0.0;
    for (double v : in) s += std::exp(v - m);
    const double lse = m + std::log(s);
    for (std::size_t j = 0; j < in.size(); ++j) o[j] = in[j] - lse;
  }
  return out;
}

LossValue cross_entropy(const Tensor& logits, std::span<const std::size_t> rows,
                        std::span<const Label> labels) {
  if (rows.empty()) throw DomainError("cross_entropy over an empty node set");
  if (rows.size() != labels.size()) throw ShapeError("cross_entropy: rows/labels length mismatch");
  LossValue out{0.0, Tensor(logits.rows(), logits.cols())};
  const double inv_n = 1.0 / static_cast<double>(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::size_t r = rows[i];
    if (r >= logits.rows()) throw IndexError("cross_entropy row out of range");
    const auto y = static_cast<std::size_t>(labels[i]);
    if (labels[i] < 0 || y >= logits.cols()) throw DomainError("label outside [0, K)");
    auto in = logits.row(r);
    auto g = out.grad.row(r);
    const double m = *std::max_element(in.begin(), in.end());
    double s = 0.0;
    for (double v : in) s += std::exp(v - m);
    const double lse = m + std::log(s);
    out.value += (lse - in[y]) * inv_n;
    for (std::size_t j = 0; j < in.size(); ++j) g[j] += std::exp(in[j] - lse) * inv_n;
    g[y] -= inv_n;
  }
  return out;
}

void validate_probability_rows(const Tensor& p, double tol) {
  for (std::size_t i = 0; i < p.rows(); ++i) {
    double s = 0.0;
    for (double v : p.row(i)) {
      if (!(v >= 0.0) || !std::isfinite(v))
        throw InvalidTargetError("soft target row " + std::to_string(i) + " has an invalid entry");
      s += v;
    }
    if (std::abs(s - 1.0) > tol)
      throw InvalidTargetError("soft target row " + std::to_string(i) + " sums to " +
                               std::to_string(s));
  }
}

LossValue kl_soft_targets(const Tensor& logits, std::span<const std::size_t> rows,
                          const Tensor& targets, KlDirection direction) {
  if (rows.empty()) throw DomainError("kl_soft_targets over an empty node set");
  if (targets.rows() != rows.size() || targets.cols() != logits.cols())
    throw ShapeError("kl_soft_targets: targets must be |rows| x K");
  validate_probability_rows(targets);
  LossValue out{0.0, Tensor(logits.rows(), logits.cols())};
  const double inv_n = 1.0 / static_cast<double>(rows.size());
  const std::size_t k = logits.cols();
  std::vector<double> logp(k);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::size_t r = rows[i];
    if (r >= logits.rows()) throw IndexError("kl_soft_targets row out of range");
    auto in = logits.row(r);
    auto z = targets.row(i);
    auto g = out.grad.row(r);
    const double m = *std::max_element(in.begin(), in.end());
    double s = 0.0;
    for (double v : in) s += std::exp(v - m);
    const double lse = m + std::log(s);
    for (std::size_t j = 0; j < k; ++j) logp[j] = in[j] - lse;

    if (direction == KlDirection::target_to_student) {
      double kl = 0.0;
      for (std::size_t j = 0; j < k; ++j)
        if (z[j] > 0.0) kl += z[j] * (std::log(z[j]) - logp[j]);
      out.value += kl * inv_n;
      for (std::size_t j = 0; j < k; ++j) g[j] += (std::exp(logp[j]) - z[j]) * inv_n;
    } else {
      // d/ds_j sum_k p_k a_k with a_k = log p_k - log z_k is p_j (a_j - KL)
      double kl = 0.0;
      std::vector<double> a(k);
      for (std::size_t j = 0; j < k; ++j) {
        a[j] = logp[j] - std::log(std::max(z[j], 1e-12));
        kl += std::exp(logp[j]) * a[j];
      }
      out.value += kl * inv_n;
      for (std::size_t j = 0; j < k; ++j) g[j] += std::exp(logp[j]) * (a[j] - kl) * inv_n;
    }
  }
  return out;
}

}  // namespace glnn
