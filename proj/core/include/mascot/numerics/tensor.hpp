#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace mascot {

using Shape = std::vector<std::size_t>;
using NodeId = std::size_t;

inline constexpr NodeId kNoNode = static_cast<NodeId>(-1);

class Tape;

std::size_t numel(const Shape& shape);
std::string to_string(const Shape& shape);

/// When on, every op output is scanned for NaN/Inf. Defaults to on in debug builds.
bool debug_checks();
void set_debug_checks(bool enabled);

/// Immutable dense float64 array in row-major order.
///
/// A tensor is either a constant or a node on a Tape; in the latter case it
/// carries the tape pointer and node id so ops can record their backward.
/// Copies share the underlying buffer.
class Tensor {
 public:
  Tensor();
  Tensor(Shape shape, std::vector<double> data);

  static Tensor zeros(Shape shape);
  static Tensor filled(Shape shape, double value);
  static Tensor scalar(double value);
  static Tensor vector(std::vector<double> values);
  static Tensor matrix(std::size_t rows, std::size_t cols, std::vector<double> values);
  /// Checks extents but skips the finiteness scan; for op results, which the
  /// tape scans when debug_checks() is on.
  static Tensor unchecked(Shape shape, std::vector<double> data);

  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t dim(std::size_t axis) const { return shape_.at(axis); }
  std::size_t numel() const { return data_->size(); }
  /// Extent of the last axis; 1 for a rank-0 tensor.
  std::size_t last_dim() const;
  /// numel() / last_dim().
  std::size_t rows() const;

  std::span<const double> data() const { return {data_->data(), data_->size()}; }
  const std::vector<double>& values() const { return *data_; }
  double operator[](std::size_t i) const { return (*data_)[i]; }
  double at(std::size_t row, std::size_t col) const;
  double item() const;

  bool requires_grad() const { return tape_ != nullptr; }
  Tape* tape() const { return tape_; }
  NodeId node() const { return node_; }

  /// Same values, no tape (stop-gradient).
  Tensor detach() const;
  /// Same buffer with a new shape; recorded on the tape when attached.
  Tensor reshape(Shape shape) const;

 private:
  friend class Tape;
  Tensor(Shape shape, std::shared_ptr<const std::vector<double>> data);

  Shape shape_;
  std::shared_ptr<const std::vector<double>> data_;
  Tape* tape_ = nullptr;
  NodeId node_ = kNoNode;
};

/// True when every element is finite.
bool all_finite(std::span<const double> values);

/// Bitwise equality of shape and payload.
bool bit_equal(const Tensor& a, const Tensor& b);

double max_abs_diff(const Tensor& a, const Tensor& b);

}  // namespace mascot
