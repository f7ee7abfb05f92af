#pragma once

#include <cstddef>
#include <span>

#include "mascot/numerics/tensor.hpp"

namespace mascot {

/// How a binary gate u enters the attention weights.
enum class GateMode {
  /// softmax(S) ⊙ u, rows left unnormalised.
  kPostSoftmax,
  /// softmax(S) ⊙ u renormalised per row; equal to a softmax over the
  /// allowed keys only, so gated-out keys carry no information forward.
  kRenormalized,
};

struct AttentionResult {
  /// [G*T, d]
  Tensor context;
  /// Raw softmax(QKᵀ/√(d/H)) per head before gating, [G, H, T, T]; constant.
  Tensor probs;
};

/// Multi-head scaled dot-product attention over G independent sequences of
/// length T packed row-wise in q, k, v [G*T, d].
///
/// `gates` is empty (no gating), one T×T matrix shared by all groups, or G
/// stacked T×T matrices; entries must be 0 or 1. Per head the context is
/// (A ⊙ u) V with A = softmax(Q Kᵀ / √(d/H)), optionally renormalised.
AttentionResult multi_head_attention(const Tensor& q, const Tensor& k, const Tensor& v,
                                     std::size_t heads, std::size_t seq_len,
                                     std::span<const double> gates, GateMode mode);

}  // namespace mascot
