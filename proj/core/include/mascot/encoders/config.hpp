#pragma once

#include <cstddef>
#include <cstdint>

namespace mascot::encoders {

/// Dimensions of the toy two-stream model. Defaults are a desk-scale
/// reduction of a ViT-B/32 frame encoder plus a 4-layer temporal transformer.
struct EncoderConfig {
  std::size_t image_height = 32;
  std::size_t image_width = 32;
  std::size_t patch_size = 8;
  std::size_t d_model = 64;
  std::size_t n_heads = 4;
  std::size_t n_layers = 2;
  std::size_t mlp_ratio = 4;
  std::size_t n_frames = 6;
  std::size_t text_len = 7;
  std::size_t vocab_size = 19;
  std::uint32_t sos_id = 1;
  std::uint32_t eos_id = 2;
  std::size_t text_layers = 2;
  std::size_t text_heads = 4;
  std::size_t temporal_layers = 2;
  std::size_t temporal_heads = 4;
  std::size_t discriminator_hidden = 32;
  double layer_norm_eps = 1e-5;
  /// Renormalise attention rows after the interaction gate (softmax over the
  /// allowed keys). Off gives the literal post-softmax product.
  bool renormalize_gated_attention = true;

  /// n = h·w / p²
  std::size_t patches_per_frame() const;
  /// n + 1 (CLS first).
  std::size_t spatial_seq_len() const;
  std::size_t patch_dim() const { return patch_size * patch_size * 3; }

  /// Throws ConfigError on a violated invariant.
  void validate() const;
};

}  // namespace mascot::encoders
