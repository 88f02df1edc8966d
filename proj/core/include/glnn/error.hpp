#pragma once

#include <stdexcept>
#include <string>

namespace glnn {

/// Base class of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand dimensions do not chain or rows/columns disagree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// An argument lies outside the domain an operation is defined on.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Dataset files reference nodes or classes that cannot exist.
class MalformedDatasetError : public Error {
 public:
  using Error::Error;
};

class InsufficientLabelsError : public Error {
 public:
  using Error::Error;
};

/// Soft target rows that are not probability vectors.
class InvalidTargetError : public Error {
 public:
  using Error::Error;
};

/// A node required by the distillation set has no soft target.
class MissingTargetError : public Error {
 public:
  using Error::Error;
};

/// Transductive/inductive protocol violated, or a model used before training.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Raised when a metric is undefined for its input (e.g. cut loss on an
/// edgeless graph).
class UndefinedMetricError : public Error {
 public:
  using Error::Error;
};

/// Training produced a non-finite loss.
class TrainingDivergedError : public Error {
 public:
  TrainingDivergedError(const std::string& what, int epoch)
      : Error(what), epoch_(epoch) {}
  int epoch() const noexcept { return epoch_; }

 private:
  int epoch_;
};

/// Graph adjacency was requested from a features-only graph.
class AdjacencyUnavailableError : public Error {
 public:
  using Error::Error;
};

}  // namespace glnn
