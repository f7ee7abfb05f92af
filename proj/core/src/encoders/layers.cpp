#include "mascot/encoders/encoders.hpp"
#include "mascot/numerics/ops.hpp"

namespace mascot::encoders {

GateMode gate_mode(const EncoderConfig& config) {
  return config.renormalize_gated_attention ? GateMode::kRenormalized : GateMode::kPostSoftmax;
}

BlockOutput msa_block(Tape* tape, const BlockParams& block, const Tensor& x, std::size_t seq_len,
                      std::size_t heads, std::span<const double> gates, GateMode mode, double ln_eps) {
  auto p = [tape](const Parameter& param) { return bind(tape, param); };

  const Tensor h = layer_norm(x, p(block.ln1_gain), p(block.ln1_bias), ln_eps);
  const Tensor q = linear(h, p(block.wq), p(block.bq));
  const Tensor k = linear(h, p(block.wk), p(block.bk));
  const Tensor v = linear(h, p(block.wv), p(block.bv));
  AttentionResult attn = multi_head_attention(q, k, v, heads, seq_len, gates, mode);
  const Tensor x1 = add(x, linear(attn.context, p(block.wo), p(block.bo)));

  const Tensor h2 = layer_norm(x1, p(block.ln2_gain), p(block.ln2_bias), ln_eps);
  const Tensor mlp = linear(gelu(linear(h2, p(block.w_fc), p(block.b_fc))), p(block.w_out), p(block.b_out));
  return {add(x1, mlp), std::move(attn.probs)};
}

std::vector<double> causal_gate(std::size_t n) {
  std::vector<double> u(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) u[i * n + j] = 1.0;
  return u;
}

}  // namespace mascot::encoders
