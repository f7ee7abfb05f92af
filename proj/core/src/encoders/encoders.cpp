#include "mascot/encoders/encoders.hpp"

#include <algorithm>
#include <string>

#include "mascot/numerics/errors.hpp"
#include "mascot/numerics/ops.hpp"

namespace mascot::encoders {

namespace {

std::vector<std::size_t> group_starts(std::size_t groups, std::size_t seq_len) {
  std::vector<std::size_t> idx(groups);
  for (std::size_t g = 0; g < groups; ++g) idx[g] = g * seq_len;
  return idx;
}

void check_gates(std::span<const double> gates, std::size_t groups, std::size_t seq_len, const char* who) {
  const std::size_t tt = seq_len * seq_len;
  if (!gates.empty() && gates.size() != tt && gates.size() != groups * tt)
    throw ContractError(std::string(who) + ": interaction mask must be " + std::to_string(seq_len) + "x" +
                        std::to_string(seq_len) + " (shared or per sequence), got " +
                        std::to_string(gates.size()) + " entries");
}

}  // namespace

std::vector<double> extract_patches(const Tensor& frames, const EncoderConfig& config) {
  const std::size_t h = config.image_height, w = config.image_width, p = config.patch_size;
  if (frames.rank() != 4 || frames.dim(1) != h || frames.dim(2) != w || frames.dim(3) != 3)
    throw ConfigError("frames must be [F, " + std::to_string(h) + ", " + std::to_string(w) + ", 3], got " +
                      to_string(frames.shape()));
  const std::size_t F = frames.dim(0), gw = w / p, n = config.patches_per_frame(), pd = config.patch_dim();
  std::vector<double> out(F * n * pd);
  const auto px = frames.data();
  for (std::size_t f = 0; f < F; ++f)
    for (std::size_t patch = 0; patch < n; ++patch) {
      const std::size_t py0 = (patch / gw) * p, px0 = (patch % gw) * p;
      double* dst = out.data() + (f * n + patch) * pd;
      for (std::size_t dy = 0; dy < p; ++dy) {
        const double* src = px.data() + ((f * h + py0 + dy) * w + px0) * 3;
        std::copy_n(src, p * 3, dst + dy * p * 3);
      }
    }
  return out;
}

Tensor patch_embed(Tape* tape, const VisionEncoderParams& enc, const Tensor& frames, const EncoderConfig& config) {
  const std::size_t n = config.patches_per_frame(), T = n + 1;
  std::vector<double> flat = extract_patches(frames, config);
  const std::size_t F = frames.dim(0);
  const Tensor patches = Tensor::unchecked({F * n, config.patch_dim()}, std::move(flat));
  const Tensor projected = linear(patches, bind(tape, enc.patch_w), bind(tape, enc.patch_b));
  // Row 0 of [cls; projected] is CLS, row 1 + f*n + i is patch i of frame f.
  std::vector<std::size_t> order;
  order.reserve(F * T);
  for (std::size_t f = 0; f < F; ++f) {
    order.push_back(0);
    for (std::size_t i = 0; i < n; ++i) order.push_back(1 + f * n + i);
  }
  const Tensor tokens = gather_rows(concat_rows(bind(tape, enc.cls), projected), order);
  const auto pos_rows = tiled_rows(T, F);
  return add(tokens, gather_rows(bind(tape, enc.pos), pos_rows));
}

SpatialOutput spatial_encode(Tape* tape, const VisionEncoderParams& enc, const Tensor& frames,
                             std::span<const double> gates, const EncoderConfig& config) {
  const std::size_t T = config.spatial_seq_len();
  if (frames.rank() != 4) throw ConfigError("spatial_encode: frames must be [F, h, w, 3]");
  const std::size_t F = frames.dim(0);
  check_gates(gates, F, T, "spatial_encode");

  SpatialOutput out;
  Tensor x = patch_embed(tape, enc, frames, config);
  out.hidden.push_back(x);
  const GateMode mode = gate_mode(config);
  for (const auto& block : enc.blocks) {
    BlockOutput b = msa_block(tape, block, x, T, config.n_heads, gates, mode, config.layer_norm_eps);
    x = b.out;
    out.hidden.push_back(x);
    out.attention_last = std::move(b.attention);
  }
  const auto starts = group_starts(F, T);
  const Tensor cls = layer_norm(gather_rows(x, starts), bind(tape, enc.ln_post_gain), bind(tape, enc.ln_post_bias),
                                config.layer_norm_eps);
  out.frame_embeddings = linear(cls, bind(tape, enc.proj));
  return out;
}

Tensor text_encode(Tape* tape, const TextEncoderParams& enc, std::span<const TokenIds> captions,
                   const EncoderConfig& config) {
  if (captions.empty()) throw InputError("text_encode: no captions");
  const std::size_t N = captions.front().size();
  if (N > config.text_len) throw InputError("text_encode: caption longer than text_len");
  std::vector<std::size_t> ids;
  ids.reserve(captions.size() * N);
  for (const auto& cap : captions) {
    if (cap.size() != N) throw InputError("text_encode: captions in a batch must share a length");
    if (cap.empty() || cap.front() != config.sos_id) throw InputError("text_encode: caption must start with SOS");
    if (std::find(cap.begin(), cap.end(), config.eos_id) == cap.end())
      throw InputError("text_encode: caption has no EOS token");
    for (auto id : cap) {
      if (id >= config.vocab_size) throw InputError("text_encode: token id " + std::to_string(id) + " out of vocabulary");
      ids.push_back(id);
    }
  }
  const std::size_t B = captions.size();
  Tensor x = add(gather_rows(bind(tape, enc.token_embedding), ids),
                 gather_rows(bind(tape, enc.pos), tiled_rows(N, B)));
  const auto causal = causal_gate(N);
  for (const auto& block : enc.blocks)
    x = msa_block(tape, block, x, N, config.text_heads, causal, GateMode::kRenormalized, config.layer_norm_eps).out;
  x = layer_norm(x, bind(tape, enc.ln_final_gain), bind(tape, enc.ln_final_bias), config.layer_norm_eps);
  return linear(x, bind(tape, enc.proj));
}

Tensor temporal_encode(Tape* tape, const TemporalEncoderParams& enc, const Tensor& frame_tokens,
                       std::size_t frames, const EncoderConfig& config) {
  if (frames == 0 || frame_tokens.rows() % frames != 0 || frames > enc.pos.value.dim(0))
    throw DimensionError("temporal_encode: token rows do not match the frame count");
  const std::size_t B = frame_tokens.rows() / frames;
  Tensor x = add(frame_tokens, gather_rows(bind(tape, enc.pos), tiled_rows(frames, B)));
  for (const auto& block : enc.blocks)
    x = msa_block(tape, block, x, frames, config.temporal_heads, {}, GateMode::kPostSoftmax, config.layer_norm_eps).out;
  return x;
}

Tensor reconstruct(Tape* tape, const BlockParams& block, const Tensor& frame_tokens, std::size_t frames,
                   std::span<const double> gates, const EncoderConfig& config) {
  if (frames == 0 || frame_tokens.rows() % frames != 0)
    throw ContractError("reconstruct: token rows do not match the frame count");
  check_gates(gates, frame_tokens.rows() / frames, frames, "reconstruct");
  return msa_block(tape, block, frame_tokens, frames, config.temporal_heads, gates, gate_mode(config),
                   config.layer_norm_eps)
      .out;
}

Tensor discriminate(Tape* tape, const DiscriminatorParams& disc, const Tensor& video_tokens, std::size_t frames) {
  const Tensor pooled = group_mean(video_tokens, frames);
  const Tensor hidden = gelu(linear(pooled, bind(tape, disc.w1), bind(tape, disc.b1)));
  return softmax_lastdim(linear(hidden, bind(tape, disc.w2), bind(tape, disc.b2)));
}

}  // namespace mascot::encoders
