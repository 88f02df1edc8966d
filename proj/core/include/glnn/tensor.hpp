#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace glnn {

/// Dense row-major float64 matrix with an optional gradient buffer of the
/// same shape. The gradient is allocated on first access.
class Tensor {
 public:
  Tensor() = default;
  Tensor(std::size_t rows, std::size_t cols, double fill = 0.0);
  Tensor(std::size_t rows, std::size_t cols, std::vector<double> data);
  Tensor(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }
  const std::vector<double>& values() const noexcept { return data_; }

  bool has_grad() const noexcept { return grad_.size() == data_.size(); }
  /// Gradient buffer; zero-initialised on first call.
  std::span<double> grad();
  std::span<const double> grad() const;
  void zero_grad();

  /// Copy of the values only (no gradient).
  Tensor detached() const { return Tensor(rows_, cols_, data_); }

  friend bool operator==(const Tensor& a, const Tensor& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
  std::vector<double> grad_;
};

// ---- dense kernels -------------------------------------------------------

/// A * B
Tensor matmul(const Tensor& a, const Tensor& b);
/// A^T * B
Tensor matmul_tn(const Tensor& a, const Tensor& b);
/// A * B^T
Tensor matmul_nt(const Tensor& a, const Tensor& b);

/// Adds `bias` to every row of `a` in place.
void add_row_vector(Tensor& a, std::span<const double> bias);
std::vector<double> column_sums(const Tensor& a);

/// Accumulates `src` into `dst` (dst += scale * src).
void axpy(std::span<double> dst, std::span<const double> src, double scale = 1.0);

Tensor gather_rows(const Tensor& a, std::span<const std::size_t> rows);

bool all_finite(std::span<const double> values) noexcept;
/// Throws DomainError naming `where` when any entry is NaN/Inf.
void require_finite(const Tensor& t, const char* where);

/// Glorot/Xavier uniform initialisation.
template <class Gen>
Tensor glorot_uniform(std::size_t fan_in, std::size_t fan_out, Gen& gen);

std::vector<std::size_t> argmax_rows(const Tensor& a);

}  // namespace glnn

#include <cmath>
#include <random>

namespace glnn {

template <class Gen>
Tensor glorot_uniform(std::size_t fan_in, std::size_t fan_out, Gen& gen) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::uniform_real_distribution<double> dist(-limit, limit);
  Tensor w(fan_in, fan_out);
  for (double& v : w.data()) v = dist(gen);
  return w;
}

}  // namespace glnn
