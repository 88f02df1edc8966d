#pragma once

#include <cstddef>
#include <span>

#include "glnn/graph.hpp"
#include "glnn/tensor.hpp"

namespace glnn {

/// Row-wise softmax, computed after subtracting each row's max.
Tensor softmax_rows(const Tensor& logits);
Tensor log_softmax_rows(const Tensor& logits);

/// A scalar loss and its gradient with respect to the logits it was computed
/// from. `grad` has the full logits shape; rows outside the loss set are zero.
struct LossValue {
  double value = 0.0;
  Tensor grad;
};

/// Mean over `rows` of -log softmax(logits)[r][labels[i]], where labels[i]
/// is the class of rows[i]. Gradient: (softmax - onehot) / |rows|.
LossValue cross_entropy(const Tensor& logits, std::span<const std::size_t> rows,
                        std::span<const Label> labels);

enum class KlDirection {
  /// KL(z || y_hat): soft-label cross-entropy up to a constant.
  target_to_student,
  /// KL(y_hat || z); zero target entries are clamped to 1e-12.
  student_to_target,
};

/// Mean over `rows` of KL between soft targets and the student softmax.
/// targets.row(i) is the probability vector for rows[i]; each must be
/// non-negative and sum to 1 within 1e-6 (InvalidTargetError otherwise).
/// For the default direction the gradient is (y_hat - z) / |rows|.
LossValue kl_soft_targets(const Tensor& logits, std::span<const std::size_t> rows,
                          const Tensor& targets,
                          KlDirection direction = KlDirection::target_to_student);

/// Throws InvalidTargetError when a row is not a probability vector.
void validate_probability_rows(const Tensor& p, double tol = 1e-6);

}  // namespace glnn
