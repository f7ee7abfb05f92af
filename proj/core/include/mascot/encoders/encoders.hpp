#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mascot/encoders/config.hpp"
#include "mascot/encoders/model.hpp"
#include "mascot/numerics/attention.hpp"
#include "mascot/numerics/tape.hpp"

// Forward passes of the toy encoders. Every function takes an optional tape:
// null evaluates on constants, non-null records for backward.
//
// Interaction gates are passed as flat row-major buffers: empty (no gating),
// one T×T matrix for every sequence, or one T×T matrix per sequence.

namespace mascot::encoders {

using TokenIds = std::vector<std::uint32_t>;

struct BlockOutput {
  /// [G*T, d]
  Tensor out;
  /// Raw head-resolved softmax attention [G, H, T, T]; constant.
  Tensor attention;
};

GateMode gate_mode(const EncoderConfig& config);

BlockOutput msa_block(Tape* tape, const BlockParams& block, const Tensor& x, std::size_t seq_len,
                      std::size_t heads, std::span<const double> gates, GateMode mode, double ln_eps);

/// frames [F, h, w, 3] -> tokens [F*(n+1), d]: flattened p×p×3 patches
/// projected linearly, CLS prepended, positional embedding added.
Tensor patch_embed(Tape* tape, const VisionEncoderParams& enc, const Tensor& frames, const EncoderConfig& config);

/// Flattened patches [F*n, p*p*3] in (dy, dx, channel) order; patch index
/// is py·(w/p) + px.
std::vector<double> extract_patches(const Tensor& frames, const EncoderConfig& config);

struct SpatialOutput {
  /// Projected final CLS token per frame, [F, d].
  Tensor frame_embeddings;
  /// Final-layer attention [F, H, n+1, n+1]; constant.
  Tensor attention_last;
  /// Token states after the embedding and after each block, each [F*(n+1), d].
  std::vector<Tensor> hidden;
};

/// Encodes every frame independently through all blocks with the same gate
/// applied at every layer.
SpatialOutput spatial_encode(Tape* tape, const VisionEncoderParams& enc, const Tensor& frames,
                             std::span<const double> gates, const EncoderConfig& config);

/// Lower-triangular gate for causal self-attention.
std::vector<double> causal_gate(std::size_t n);

/// Captions of equal length (SOS first, EOS present) -> tokens [B*N, d].
Tensor text_encode(Tape* tape, const TextEncoderParams& enc, std::span<const TokenIds> captions,
                   const EncoderConfig& config);

/// frame tokens [B*M, d] -> video tokens [B*M, d], bidirectional over M.
Tensor temporal_encode(Tape* tape, const TemporalEncoderParams& enc, const Tensor& frame_tokens,
                       std::size_t frames, const EncoderConfig& config);

/// One gated self-attention block over frame tokens [B*M, d].
Tensor reconstruct(Tape* tape, const BlockParams& block, const Tensor& frame_tokens, std::size_t frames,
                   std::span<const double> gates, const EncoderConfig& config);

/// Video tokens [B*M, d] -> class probabilities [B, 2]; column 0 is "masked".
Tensor discriminate(Tape* tape, const DiscriminatorParams& disc, const Tensor& video_tokens, std::size_t frames);

inline constexpr std::size_t kMaskedClass = 0;
inline constexpr std::size_t kUnmaskedClass = 1;

}  // namespace mascot::encoders
