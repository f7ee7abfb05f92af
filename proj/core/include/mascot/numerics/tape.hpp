#pragma once

#include <functional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "mascot/numerics/tensor.hpp"

namespace mascot {

/// A named trainable value. Models hold Parameters; a Tape binds each one to
/// a single leaf node per forward pass, so every use of a shared Parameter
/// accumulates into the same gradient buffer.
struct Parameter {
  std::string name;
  Tensor value;
  /// Pretrained-backbone group (frame and text encoders) vs newly added modules.
  bool backbone = false;
};

/// Handed to a node's backward closure to accumulate input gradients.
class GradSink {
 public:
  /// Gradient buffer of the node's `input`-th input, zero-initialised on first
  /// use; empty when that input is a constant.
  std::span<double> operator[](std::size_t input);

 private:
  friend class Tape;
  GradSink(std::vector<std::vector<double>>& buffers,
           const std::vector<std::size_t>& sizes,
           const std::vector<NodeId>& inputs)
      : buffers_(buffers), sizes_(sizes), inputs_(inputs) {}

  std::vector<std::vector<double>>& buffers_;
  const std::vector<std::size_t>& sizes_;
  const std::vector<NodeId>& inputs_;
};

class Gradients {
 public:
  /// Gradient w.r.t. a tape tensor; zeros when nothing flowed into it.
  std::vector<double> of(const Tensor& t) const;
  /// Gradient w.r.t. a parameter bound on the tape; zeros when unused.
  std::vector<double> of(const Parameter& p) const;
  bool touched(const Parameter& p) const;

 private:
  friend class Tape;
  std::vector<std::vector<double>> buffers_;
  std::vector<std::size_t> sizes_;
  std::unordered_map<const Parameter*, NodeId> params_;
};

/// Append-only record of a forward pass. Nodes are stored in insertion order,
/// which is a topological order; backward walks them strictly in reverse.
class Tape {
 public:
  using Backward = std::function<void(std::span<const double> grad_out, GradSink& sink)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  /// Leaf that requires grad.
  Tensor variable(const Tensor& value);
  /// Leaf bound to `p`; repeated calls return the same node.
  Tensor parameter(const Parameter& p);
  /// Appends an interior node. Used by ops; inputs are node ids on this tape
  /// or kNoNode for constants.
  Tensor record(Tensor value, std::vector<NodeId> inputs, Backward backward);

  /// Reverse sweep from a scalar loss. Does not mutate the tape, so several
  /// losses can be differentiated from one forward pass.
  Gradients backward(const Tensor& loss) const;

  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    std::vector<NodeId> inputs;
    std::size_t numel = 0;
    Backward backward;
  };

  std::vector<Node> nodes_;
  std::unordered_map<const Parameter*, NodeId> params_;
};

/// Binds a parameter when a tape is present, otherwise yields its constant value.
inline Tensor bind(Tape* tape, const Parameter& p) {
  return tape ? tape->parameter(p) : p.value;
}

}  // namespace mascot
