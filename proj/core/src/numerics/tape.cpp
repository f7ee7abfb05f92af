#include "mascot/numerics/tape.hpp"

#include "mascot/numerics/errors.hpp"

namespace mascot {

std::span<double> GradSink::operator[](std::size_t input) {
  const NodeId id = inputs_.at(input);
  if (id == kNoNode) return {};
  auto& buf = buffers_[id];
  if (buf.empty()) buf.assign(sizes_[id], 0.0);
  return buf;
}

std::vector<double> Gradients::of(const Tensor& t) const {
  if (!t.requires_grad() || t.node() >= buffers_.size() || buffers_[t.node()].empty())
    return std::vector<double>(t.numel(), 0.0);
  return buffers_[t.node()];
}

std::vector<double> Gradients::of(const Parameter& p) const {
  auto it = params_.find(&p);
  if (it == params_.end() || buffers_[it->second].empty())
    return std::vector<double>(p.value.numel(), 0.0);
  return buffers_[it->second];
}

bool Gradients::touched(const Parameter& p) const {
  auto it = params_.find(&p);
  return it != params_.end() && !buffers_[it->second].empty();
}

Tensor Tape::variable(const Tensor& value) {
  Tensor out = value.detach();
  out.tape_ = this;
  out.node_ = nodes_.size();
  nodes_.push_back(Node{{}, value.numel(), nullptr});
  return out;
}

Tensor Tape::parameter(const Parameter& p) {
  auto it = params_.find(&p);
  if (it != params_.end()) {
    Tensor out = p.value.detach();
    out.tape_ = this;
    out.node_ = it->second;
    return out;
  }
  Tensor out = variable(p.value);
  params_.emplace(&p, out.node_);
  return out;
}

Tensor Tape::record(Tensor value, std::vector<NodeId> inputs, Backward backward) {
  if (debug_checks() && !all_finite(value.data()))
    throw ContractError("non-finite value produced on tape at node " + std::to_string(nodes_.size()));
  for (auto id : inputs)
    if (id != kNoNode && id >= nodes_.size()) throw ContractError("tape input refers to a node not on this tape");
  value.tape_ = this;
  value.node_ = nodes_.size();
  nodes_.push_back(Node{std::move(inputs), value.numel(), std::move(backward)});
  return value;
}

Gradients Tape::backward(const Tensor& loss) const {
  if (loss.numel() != 1) throw ContractError("backward() needs a scalar loss, got shape " + to_string(loss.shape()));
  if (loss.tape() != this) throw ContractError("backward() loss is not on this tape");

  Gradients g;
  g.buffers_.resize(nodes_.size());
  g.sizes_.reserve(nodes_.size());
  for (const auto& n : nodes_) g.sizes_.push_back(n.numel);
  g.params_ = params_;
  g.buffers_[loss.node()] = {1.0};

  for (NodeId id = loss.node() + 1; id-- > 0;) {
    const Node& node = nodes_[id];
    if (!node.backward || g.buffers_[id].empty()) continue;
    GradSink sink(g.buffers_, g.sizes_, node.inputs);
    // Inputs always precede `id`, so this buffer is never resized underneath the closure.
    node.backward(g.buffers_[id], sink);
  }
  return g;
}

}  // namespace mascot
