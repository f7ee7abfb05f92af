#include "mascot/colearning/pipeline.hpp"

#include "mascot/encoders/encoders.hpp"
#include "mascot/masking/masks.hpp"
#include "mascot/numerics/errors.hpp"
#include "mascot/numerics/ops.hpp"
#include "mascot/numerics/rng.hpp"

namespace mascot::colearning {

using encoders::EncoderConfig;
using encoders::ModelParams;
using masking::FrameMasks;

UnmaskedPass encode_unmasked(Tape* tape, const ModelParams& model, const data::Batch& batch) {
  const EncoderConfig& cfg = model.config();
  if (batch.frames != cfg.n_frames) throw ConfigError("batch frame count differs from the model's n_frames");
  encoders::SpatialOutput sp = encoders::spatial_encode(tape, *model.spatial, batch.videos, {}, cfg);
  UnmaskedPass out;
  out.video = encoders::temporal_encode(tape, *model.video_h, sp.frame_embeddings, batch.frames, cfg);
  out.text = encoders::text_encode(tape, *model.text, batch.captions, cfg);
  out.attention_last = std::move(sp.attention_last);
  return out;
}

namespace {

FrameMasks branch_mask(const Tensor& attention, std::size_t item, double ratio, masking::MaskKind kind,
                       MaskStrategy strategy, const EncoderConfig& cfg, Rng& rng) {
  const std::size_t M = cfg.n_frames, n = cfg.patches_per_frame();
  switch (strategy) {
    case MaskStrategy::kInformed: {
      const auto [a_s, a_e] = masking::sample_tube(M, rng);
      const auto w = masking::extract_cls_weights(attention, a_s, a_e, item * M, M);
      return masking::to_frame_masks(masking::informed_mask(w, ratio, kind), M);
    }
    case MaskStrategy::kRandom: return masking::random_frame_masks(n, M, ratio, rng);
    case MaskStrategy::kRandomTube: return masking::to_frame_masks(masking::random_tube_mask(n, M, ratio, rng), M);
  }
  throw ContractError("unhandled mask strategy");
}

void append(std::vector<double>& dst, const std::vector<double>& src) { dst.insert(dst.end(), src.begin(), src.end()); }

void append_spatial_gates(std::vector<double>& gates, const FrameMasks& masks, std::size_t n) {
  for (const auto& patches : masks.per_frame)
    append(gates, masking::spatial_interaction_mask(masking::patch_flags(patches, n)).u);
}

Tensor mask_pixels(const data::Batch& batch, const std::vector<FrameMasks>& masks, std::size_t patch_size, Rng& rng) {
  std::vector<double> px;
  px.reserve(batch.videos.numel());
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const Tensor v = masking::apply_pixel_mask(batch.video(b), masks[b], patch_size, rng);
    append(px, v.values());
  }
  return Tensor::unchecked(batch.videos.shape(), std::move(px));
}

}  // namespace

MaskPlan plan_masks(const Tensor& attention_last, const data::Batch& batch, const TrainConfig& train,
                    const EncoderConfig& cfg, std::uint64_t seed) {
  const std::size_t B = batch.size(), n = cfg.patches_per_frame();
  if (attention_last.rank() != 4 || attention_last.dim(0) != B * cfg.n_frames)
    throw DimensionError("plan_masks: attention must cover every frame of the batch");
  Rng rng(seed);
  MaskPlan plan;
  for (std::size_t b = 0; b < B; ++b) {
    plan.high.push_back(branch_mask(attention_last, b, train.r_high, masking::MaskKind::kHigh, train.strategy, cfg, rng));
    plan.low.push_back(branch_mask(attention_last, b, train.r_low, masking::MaskKind::kLow, train.strategy, cfg, rng));
  }
  plan.video_high = mask_pixels(batch, plan.high, cfg.patch_size, rng);
  plan.video_low = mask_pixels(batch, plan.low, cfg.patch_size, rng);
  for (std::size_t b = 0; b < B; ++b) {
    append_spatial_gates(plan.spatial_high, plan.high[b], n);
    append_spatial_gates(plan.spatial_low, plan.low[b], n);
    append(plan.temporal_high, masking::temporal_interaction_mask(masking::frame_flags(plan.high[b])).u);
  }
  return plan;
}

Tensor text_video_similarity(Tape* tape, const ModelParams& model, const Tensor& text, std::size_t text_len,
                             const Tensor& video, std::size_t frames) {
  const auto& g = *model.wti;
  return objectives::wti_similarity(tape, text, text_len, g.text_w, g.text_b, video, frames, g.video_w, g.video_b);
}

objectives::LossParts compute_losses(Tape* tape, const ModelParams& model, const data::Batch& batch,
                                     const UnmaskedPass& unmasked, const MaskPlan& plan, const TrainConfig& train,
                                     const LossOptions& options, BranchOutputs* outputs) {
  const EncoderConfig& cfg = model.config();
  const std::size_t M = batch.frames, N = batch.captions.front().size();
  const auto& g = *model.wti;
  const Tensor tau = objectives::temperature(tape, *model.log_tau);
  const Tensor zero = Tensor::scalar(0.0);
  auto vtc = [&](const Tensor& video) {
    return objectives::contrastive_loss(text_video_similarity(tape, model, unmasked.text, N, video, M), tau);
  };
  const Tensor target = options.frozen_target     ? options.frozen_target->detach()
                        : options.detach_targets ? unmasked.video.detach()
                                                 : unmasked.video;
  auto vvc = [&](const Tensor& video) {
    const Tensor s = objectives::wti_similarity(tape, target, M, g.video_w, g.video_b, video, M, g.video_w, g.video_b);
    return objectives::contrastive_loss(s, tau);
  };

  objectives::LossParts parts{vtc(unmasked.video), zero, zero, zero, zero, zero};

  if (train.enable_high) {
    const auto co = encoders::spatial_encode(tape, *model.co_encoder, plan.video_high, plan.spatial_high, cfg);
    const Tensor r = encoders::reconstruct(tape, *model.reconstructor, co.frame_embeddings, M, plan.temporal_high, cfg);
    const Tensor e_rh = encoders::temporal_encode(tape, *model.video_h, r, M, cfg);
    parts.vtc_h = vtc(e_rh);
    parts.vvc_h = vvc(e_rh);
    if (outputs) outputs->video_high = e_rh;
  }
  if (train.enable_low) {
    const auto co = encoders::spatial_encode(tape, *model.co_encoder, plan.video_low, plan.spatial_low, cfg);
    const Tensor e_rl = encoders::temporal_encode(tape, *model.video_l, co.frame_embeddings, M, cfg);
    parts.vtc_l = vtc(e_rl);
    parts.vvc_l = vvc(e_rl);
    auto reverse = [&](const Tensor& x) { return options.use_grl ? grl(x, train.grl_lambda) : x; };
    const Tensor d_masked = encoders::discriminate(tape, *model.discriminator, reverse(e_rl), M);
    // The unmasked side is the reference domain: it trains the discriminator but sends nothing back.
    const Tensor d_unmasked = encoders::discriminate(tape, *model.discriminator, target, M);
    parts.adv = objectives::adversarial_loss(d_masked, d_unmasked);
    if (outputs) {
      outputs->video_low = e_rl;
      outputs->disc_masked = d_masked;
      outputs->disc_unmasked = d_unmasked;
    }
  }
  return parts;
}

}  // namespace mascot::colearning
