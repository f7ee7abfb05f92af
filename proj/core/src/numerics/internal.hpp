#pragma once

#include <Eigen/Core>
#include <initializer_list>
#include <span>
#include <vector>

#include "mascot/numerics/errors.hpp"
#include "mascot/numerics/tape.hpp"
#include "mascot/numerics/tensor.hpp"

namespace mascot::detail {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using CMap = Eigen::Map<const RowMat>;
using MMap = Eigen::Map<RowMat>;

// Eigen's vectorised loops peel up to the first aligned element of whatever
// they write or reduce, so over arbitrary heap memory the split between fused
// packet lanes and scalar lanes moves with the allocation. Products therefore
// run on Eigen-owned copies, which makes results a function of values alone.
inline RowMat owned(const double* p, std::size_t rows, std::size_t cols) {
  return CMap(p, static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
}

inline std::vector<double> to_vector(const RowMat& m) { return {m.data(), m.data() + m.size()}; }

inline void add_into(std::span<double> dst, const RowMat& m) {
  const double* src = m.data();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
}

inline Tape* common_tape(std::span<const Tensor* const> inputs) {
  Tape* tape = nullptr;
  for (const Tensor* t : inputs) {
    if (!t->tape()) continue;
    if (tape && tape != t->tape()) throw ContractError("op inputs live on different tapes");
    tape = t->tape();
  }
  return tape;
}

/// Wraps an op result; records it with `backward` when any input is on a tape.
inline Tensor emit(Shape shape, std::vector<double> data, std::span<const Tensor* const> inputs,
                   Tape::Backward backward) {
  Tensor out = Tensor::unchecked(std::move(shape), std::move(data));
  Tape* tape = common_tape(inputs);
  if (!tape) {
    if (debug_checks() && !all_finite(out.data())) throw ContractError("non-finite op result");
    return out;
  }
  std::vector<NodeId> ids;
  ids.reserve(inputs.size());
  for (const Tensor* t : inputs) ids.push_back(t->requires_grad() ? t->node() : kNoNode);
  return tape->record(std::move(out), std::move(ids), std::move(backward));
}

inline Tensor emit(Shape shape, std::vector<double> data, std::initializer_list<const Tensor*> inputs,
                   Tape::Backward backward) {
  return emit(std::move(shape), std::move(data), std::span<const Tensor* const>(inputs.begin(), inputs.size()),
              std::move(backward));
}

}  // namespace mascot::detail
