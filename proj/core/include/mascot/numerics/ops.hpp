#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mascot/numerics/tensor.hpp"

// Differentiable tensor operations. Every op accepts constants or tape
// tensors; when any input lives on a tape the result is recorded on it.
// Shapes are explicit: the only broadcasting is the trailing-dim affine in
// linear() and layer_norm().

namespace mascot {

Tensor matmul(const Tensor& a, const Tensor& b);
/// a · bᵀ for a[m,k], b[n,k].
Tensor matmul_nt(const Tensor& a, const Tensor& b);
/// x[..., k] · w[k, n] + bias[n].
Tensor linear(const Tensor& x, const Tensor& w, const Tensor& bias);
Tensor linear(const Tensor& x, const Tensor& w);
Tensor transpose(const Tensor& a);

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double c);
/// Elementwise a / s for a rank-0 or single-element s.
Tensor div_scalar(const Tensor& a, const Tensor& s);
/// Σ wᵢ·tᵢ over same-shaped tensors, summed left to right.
Tensor weighted_sum(std::span<const Tensor> terms, std::span<const double> weights);

Tensor exp(const Tensor& x);
/// log(max(x, floor)); the gradient is zero where the floor is active.
Tensor log_clamped(const Tensor& x, double floor = 1e-12);
Tensor clamp(const Tensor& x, double lo, double hi);
/// Tanh-approximated GELU.
Tensor gelu(const Tensor& x);

Tensor softmax_lastdim(const Tensor& x);
Tensor log_softmax_lastdim(const Tensor& x);
Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias, double eps = 1e-5);
/// Rows scaled to unit L2 norm (eps guards the zero row).
Tensor normalize_rows(const Tensor& x, double eps = 1e-12);

/// Identity forward; backward scales the incoming gradient by −lambda.
Tensor grl(const Tensor& x, double lambda);

Tensor sum(const Tensor& x);
Tensor mean(const Tensor& x);
/// x[G*T, d] -> [G, d], mean over each run of `group` consecutive rows.
Tensor group_mean(const Tensor& x, std::size_t group);

/// Rows of x (viewed as [rows, last_dim]) picked by index; repeats allowed.
Tensor gather_rows(const Tensor& x, std::span<const std::size_t> index);
Tensor concat_rows(const Tensor& a, const Tensor& b);
/// Flat elements of x picked by index, as a vector.
Tensor gather_elements(const Tensor& x, std::span<const std::size_t> index);

/// Row indices that repeat [0, period) `times` times.
std::vector<std::size_t> tiled_rows(std::size_t period, std::size_t times);

}  // namespace mascot
