#include <Eigen/Core>
#include <algorithm>
#include <cmath>

#include "internal.hpp"
#include "mascot/numerics/attention.hpp"

namespace mascot {

using detail::RowMat;

namespace {

using Strided = Eigen::OuterStride<>;
using CBlock = Eigen::Map<const RowMat, 0, Strided>;

// Head slice [T, dh] of a [G*T, d] buffer, copied to Eigen-owned storage (see
// detail::owned for why products never run on the raw buffers).
void gather(RowMat& dst, const double* base, std::size_t off, std::size_t T, std::size_t dh, std::size_t d) {
  dst = CBlock(base + off, static_cast<Eigen::Index>(T), static_cast<Eigen::Index>(dh), Strided(static_cast<Eigen::Index>(d)));
}

void scatter_add(double* base, std::size_t off, const RowMat& src, std::size_t d) {
  for (Eigen::Index i = 0; i < src.rows(); ++i)
    for (Eigen::Index j = 0; j < src.cols(); ++j) base[off + static_cast<std::size_t>(i) * d + static_cast<std::size_t>(j)] += src(i, j);
}

}  // namespace

AttentionResult multi_head_attention(const Tensor& q, const Tensor& k, const Tensor& v,
                                     std::size_t heads, std::size_t seq_len,
                                     std::span<const double> gates, GateMode mode) {
  if (q.rank() != 2 || q.shape() != k.shape() || q.shape() != v.shape())
    throw DimensionError("attention: q, k, v must be matrices of equal shape");
  const std::size_t rows = q.dim(0), d = q.dim(1), T = seq_len;
  if (T == 0 || rows % T != 0) throw DimensionError("attention: rows not divisible by sequence length");
  if (heads == 0 || d % heads != 0) throw ConfigError("attention: width not divisible by head count");
  const std::size_t G = rows / T, H = heads, dh = d / H;
  const std::size_t TT = T * T;
  if (!gates.empty() && gates.size() != TT && gates.size() != G * TT)
    throw ContractError("attention: gate must be T×T or G×T×T");
  for (double u : gates)
    if (u != 0.0 && u != 1.0) throw ContractError("attention: gate entries must be 0 or 1");
  const bool gated = !gates.empty();
  const bool shared_gate = gates.size() == TT;
  auto gate_of = [&](std::size_t g) { return gates.data() + (shared_gate ? 0 : g * TT); };

  if (gated && mode == GateMode::kRenormalized) {
    for (std::size_t g = 0; g < (shared_gate ? 1 : G); ++g) {
      const double* u = gate_of(g);
      for (std::size_t i = 0; i < T; ++i)
        if (std::all_of(u + i * T, u + (i + 1) * T, [](double x) { return x == 0.0; }))
          throw ContractError("attention: renormalised gate has an all-zero row");
    }
  }

  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  std::vector<double> probs(G * H * TT), weights(G * H * TT), ctx(rows * d, 0.0);
  RowMat S(T, T), Wm(T, T), Q, K, V, C;

  for (std::size_t g = 0; g < G; ++g) {
    const double* u = gated ? gate_of(g) : nullptr;
    for (std::size_t h = 0; h < H; ++h) {
      const std::size_t off = g * T * d + h * dh;
      gather(Q, q.data().data(), off, T, dh, d);
      gather(K, k.data().data(), off, T, dh, d);
      gather(V, v.data().data(), off, T, dh, d);
      S.noalias() = (Q * K.transpose()) * scale;
      double* P = probs.data() + (g * H + h) * TT;
      double* W = weights.data() + (g * H + h) * TT;
      for (std::size_t i = 0; i < T; ++i) {
        const double* s = S.data() + i * T;
        const double m = *std::max_element(s, s + T);
        double z = 0.0;
        for (std::size_t j = 0; j < T; ++j) z += (P[i * T + j] = std::exp(s[j] - m));
        for (std::size_t j = 0; j < T; ++j) P[i * T + j] /= z;
        if (!gated) {
          std::copy_n(P + i * T, T, W + i * T);
        } else if (mode == GateMode::kPostSoftmax) {
          for (std::size_t j = 0; j < T; ++j) W[i * T + j] = P[i * T + j] * u[i * T + j];
        } else {
          // Softmax restricted to allowed keys: gated-out entries never enter max or sum.
          double ma = -INFINITY;
          for (std::size_t j = 0; j < T; ++j)
            if (u[i * T + j] != 0.0) ma = std::max(ma, s[j]);
          double za = 0.0;
          for (std::size_t j = 0; j < T; ++j) {
            W[i * T + j] = u[i * T + j] != 0.0 ? std::exp(s[j] - ma) : 0.0;
            za += W[i * T + j];
          }
          for (std::size_t j = 0; j < T; ++j) W[i * T + j] /= za;
        }
      }
      Wm = Eigen::Map<const RowMat>(W, T, T);
      C.noalias() = Wm * V;
      scatter_add(ctx.data(), off, C, d);
    }
  }

  Tensor probs_t = Tensor::unchecked({G, H, T, T}, probs);
  std::vector<double> gate_copy(gates.begin(), gates.end());
  auto backward = [q, k, v, G, H, T, d, dh, scale, mode, shared_gate, probs = std::move(probs),
                   weights = std::move(weights), gate_copy = std::move(gate_copy)](std::span<const double> grad,
                                                                                    GradSink& sink) {
    auto dq = sink[0];
    auto dk = sink[1];
    auto dv = sink[2];
    const std::size_t TT = T * T;
    const bool gated = !gate_copy.empty();
    RowMat dW(T, T), dS(T, T), W, Q, K, V, dC, part;
    for (std::size_t g = 0; g < G; ++g) {
      const double* u = gated ? gate_copy.data() + (shared_gate ? 0 : g * TT) : nullptr;
      for (std::size_t h = 0; h < H; ++h) {
        const std::size_t off = g * T * d + h * dh;
        gather(Q, q.data().data(), off, T, dh, d);
        gather(K, k.data().data(), off, T, dh, d);
        gather(V, v.data().data(), off, T, dh, d);
        gather(dC, grad.data(), off, T, dh, d);
        W = Eigen::Map<const RowMat>(weights.data() + (g * H + h) * TT, T, T);
        const double* P = probs.data() + (g * H + h) * TT;

        dW.noalias() = dC * V.transpose();
        if (!dv.empty()) {
          part.noalias() = W.transpose() * dC;
          scatter_add(dv.data(), off, part, d);
        }

        const bool through_raw = gated && mode == GateMode::kPostSoftmax;
        for (std::size_t i = 0; i < T; ++i) {
          if (through_raw) {
            double dot = 0.0;
            for (std::size_t j = 0; j < T; ++j) dot += dW(i, j) * u[i * T + j] * P[i * T + j];
            for (std::size_t j = 0; j < T; ++j) dS(i, j) = P[i * T + j] * (dW(i, j) * u[i * T + j] - dot);
          } else {
            double dot = 0.0;
            for (std::size_t j = 0; j < T; ++j) dot += dW(i, j) * W(i, j);
            for (std::size_t j = 0; j < T; ++j) dS(i, j) = W(i, j) * (dW(i, j) - dot);
          }
        }
        dS *= scale;
        if (!dq.empty()) {
          part.noalias() = dS * K;
          scatter_add(dq.data(), off, part, d);
        }
        if (!dk.empty()) {
          part.noalias() = dS.transpose() * Q;
          scatter_add(dk.data(), off, part, d);
        }
      }
    }
  };

  Tensor context = detail::emit({rows, d}, std::move(ctx), {&q, &k, &v}, std::move(backward));
  return {std::move(context), std::move(probs_t)};
}

}  // namespace mascot
