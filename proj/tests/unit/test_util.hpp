#pragma once

#include <cstdint>
#include <vector>

#include "mascot/encoders/config.hpp"
#include "mascot/numerics/rng.hpp"
#include "mascot/numerics/tensor.hpp"

namespace mascot::testing {

inline Tensor random_tensor(Shape shape, std::uint64_t seed, double scale = 1.0) {
  Rng rng(seed);
  std::vector<double> v(numel(shape));
  for (double& x : v) x = scale * rng.normal();
  return Tensor(std::move(shape), std::move(v));
}

inline Tensor random_uniform(Shape shape, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(numel(shape));
  for (double& x : v) x = rng.uniform();
  return Tensor(std::move(shape), std::move(v));
}

// 8x8 frames, 4 patches, 3 frames: small enough to probe every coordinate.
inline encoders::EncoderConfig tiny_config() {
  encoders::EncoderConfig c;
  c.image_height = c.image_width = 8;
  c.patch_size = 4;
  c.d_model = 8;
  c.n_heads = c.text_heads = c.temporal_heads = 2;
  c.n_layers = c.text_layers = c.temporal_layers = 1;
  c.mlp_ratio = 2;
  c.n_frames = 3;
  c.discriminator_hidden = 4;
  return c;
}

}  // namespace mascot::testing
