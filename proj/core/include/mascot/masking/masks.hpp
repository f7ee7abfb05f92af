#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "mascot/masking/types.hpp"
#include "mascot/numerics/rng.hpp"
#include "mascot/numerics/tensor.hpp"

namespace mascot::masking {

/// Head-averaged CLS row (columns 1..n) of attention [F, H, n+1, n+1],
/// averaged over frames frame_offset+a_s .. frame_offset+a_e.
/// Throws InputError when the range is out of bounds.
AttentionWeights extract_cls_weights(const Tensor& attention, std::size_t a_s, std::size_t a_e,
                                     std::size_t frame_offset = 0, std::size_t frames = 0);

/// Uniform draw over unordered frame pairs {i, j} (i == j allowed), sorted.
std::pair<std::size_t, std::size_t> sample_tube(std::size_t frames, Rng& rng);

/// ⌊r·n⌋, guarded against representation error in r·n.
std::size_t mask_count(double ratio, std::size_t n);

/// Top-k (kHigh) or bottom-k (kLow) patches by weight with k = ⌊r·n⌋.
/// Ties go to the lower index. The tube range is taken from `weights`.
TubeMask informed_mask(const AttentionWeights& weights, double ratio, MaskKind kind);

/// Independent ⌊r·n⌋-subset for every frame.
FrameMasks random_frame_masks(std::size_t n, std::size_t frames, double ratio, Rng& rng);
/// One ⌊r·n⌋-subset shared by every frame of a sampled tube.
TubeMask random_tube_mask(std::size_t n, std::size_t frames, double ratio, Rng& rng);

using BaselineMask = std::variant<FrameMasks, TubeMask>;
/// kind must be kRandom or kRandomTube.
BaselineMask baseline_mask(std::size_t n, std::size_t frames, double ratio, MaskKind kind, Rng& rng);

/// Per-frame patch lists covering `frames` frames.
FrameMasks to_frame_masks(const TubeMask& mask, std::size_t frames);
FrameMasks to_frame_masks(const BaselineMask& mask, std::size_t frames);

/// Copy of video [M, h, w, 3] with every listed patch of every listed frame
/// replaced by i.i.d. uniform [0, 1) pixels.
Tensor apply_pixel_mask(const Tensor& video, const FrameMasks& masks, std::size_t patch_size, Rng& rng);
Tensor apply_pixel_mask(const Tensor& video, const TubeMask& mask, std::size_t patch_size, Rng& rng);

/// u(i, j) = 0 iff token j is masked and i != j. flags[0] is CLS and must be unmasked.
InteractionMask spatial_interaction_mask(std::span<const TokenFlag> flags);
/// u(i, j) = 0 iff frame i is unmasked and frame j is masked.
InteractionMask temporal_interaction_mask(std::span<const TokenFlag> flags);

/// Token flags [n+1] for one frame; CLS unmasked.
std::vector<TokenFlag> patch_flags(std::span<const std::size_t> masked_patches, std::size_t n);
/// A frame counts as masked when any of its patches is.
std::vector<TokenFlag> frame_flags(const FrameMasks& masks);

}  // namespace mascot::masking
