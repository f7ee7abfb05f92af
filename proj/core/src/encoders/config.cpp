#include "mascot/encoders/config.hpp"

#include <string>

#include "mascot/numerics/errors.hpp"

namespace mascot::encoders {

std::size_t EncoderConfig::patches_per_frame() const {
  return (image_height / patch_size) * (image_width / patch_size);
}

std::size_t EncoderConfig::spatial_seq_len() const { return patches_per_frame() + 1; }

void EncoderConfig::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError("encoder config: " + what); };
  if (patch_size == 0 || image_height == 0 || image_width == 0) fail("image and patch sizes must be positive");
  if (image_height % patch_size != 0 || image_width % patch_size != 0)
    fail("image size " + std::to_string(image_height) + "x" + std::to_string(image_width) +
         " is not a multiple of patch size " + std::to_string(patch_size));
  if (d_model < 2) fail("d_model must be at least 2");
  if (n_heads == 0 || d_model % n_heads != 0) fail("d_model must be divisible by n_heads");
  if (text_heads == 0 || d_model % text_heads != 0) fail("d_model must be divisible by text_heads");
  if (temporal_heads == 0 || d_model % temporal_heads != 0) fail("d_model must be divisible by temporal_heads");
  if (n_layers == 0) fail("n_layers must be positive");
  if (n_frames == 0) fail("n_frames must be positive");
  if (text_len < 2) fail("text_len must fit SOS and EOS");
  if (vocab_size <= sos_id || vocab_size <= eos_id) fail("vocab_size must cover the SOS/EOS ids");
  if (mlp_ratio == 0 || discriminator_hidden == 0) fail("hidden widths must be positive");
  if (!(layer_norm_eps > 0.0)) fail("layer_norm_eps must be positive");
}

}  // namespace mascot::encoders
