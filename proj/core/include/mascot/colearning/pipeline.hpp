#pragma once

#include <cstdint>
#include <vector>

#include "mascot/colearning/config.hpp"
#include "mascot/data/dataset.hpp"
#include "mascot/encoders/model.hpp"
#include "mascot/masking/types.hpp"
#include "mascot/numerics/tape.hpp"
#include "mascot/objectives/losses.hpp"

// One forward pass of the four-branch objective, split so tests can hold the
// mask plan fixed while perturbing parameters.

namespace mascot::colearning {

struct UnmaskedPass {
  /// e_v, temporal-encoder output [B*M, d].
  Tensor video;
  /// e_t, text tokens [B*N, d].
  Tensor text;
  /// Final spatial-layer attention [B*M, H, n+1, n+1]; constant.
  Tensor attention_last;
};

UnmaskedPass encode_unmasked(Tape* tape, const encoders::ModelParams& model, const data::Batch& batch);

struct MaskPlan {
  /// Per batch item, one patch list per frame.
  std::vector<masking::FrameMasks> high, low;
  /// Pixel-masked clips [B*M, h, w, 3].
  Tensor video_high, video_low;
  /// Spatial interaction gates, one (n+1)² block per frame.
  std::vector<double> spatial_high, spatial_low;
  /// Temporal interaction gates for the reconstructor, one M² block per item.
  std::vector<double> temporal_high;
};

/// Masks for both branches from the unmasked attention. `seed` drives tube
/// ranges, random masks and replacement pixels; H and L draw independently.
MaskPlan plan_masks(const Tensor& attention_last, const data::Batch& batch, const TrainConfig& train,
                    const encoders::EncoderConfig& config, std::uint64_t seed);

struct LossOptions {
  /// Route the discriminator input through the gradient reversal layer.
  bool use_grl = true;
  /// Stop-gradient on e_v as the target of the video-video terms.
  bool detach_targets = true;
  /// Constant used as that target instead of this pass's e_v. Lets a
  /// finite-difference probe hold the target fixed the way backward does.
  const Tensor* frozen_target = nullptr;
};

/// Branch outputs kept for inspection.
struct BranchOutputs {
  Tensor video_high;  // e_v^{rH}
  Tensor video_low;   // e_v^{rL}
  Tensor disc_masked, disc_unmasked;
};

/// Six loss components; disabled branches contribute constant zeros.
objectives::LossParts compute_losses(Tape* tape, const encoders::ModelParams& model, const data::Batch& batch,
                                     const UnmaskedPass& unmasked, const MaskPlan& plan, const TrainConfig& train,
                                     const LossOptions& options = {}, BranchOutputs* outputs = nullptr);

/// t2v-oriented similarity [B_text, B_video] for text tokens vs video tokens.
Tensor text_video_similarity(Tape* tape, const encoders::ModelParams& model, const Tensor& text,
                             std::size_t text_len, const Tensor& video, std::size_t frames);

}  // namespace mascot::colearning
