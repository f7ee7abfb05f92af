#include "mascot/masking/masks.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mascot/numerics/errors.hpp"

namespace mascot::masking {

std::string to_string(MaskKind kind) {
  switch (kind) {
    case MaskKind::kHigh: return "high";
    case MaskKind::kLow: return "low";
    case MaskKind::kRandom: return "random";
    case MaskKind::kRandomTube: return "random_tube";
  }
  return "unknown";
}

MaskKind parse_mask_kind(const std::string& s) {
  if (s == "high") return MaskKind::kHigh;
  if (s == "low") return MaskKind::kLow;
  if (s == "random") return MaskKind::kRandom;
  if (s == "random_tube") return MaskKind::kRandomTube;
  throw InputError("unknown mask kind '" + s + "'");
}

AttentionWeights extract_cls_weights(const Tensor& attention, std::size_t a_s, std::size_t a_e,
                                     std::size_t frame_offset, std::size_t frames) {
  if (attention.rank() != 4 || attention.dim(2) != attention.dim(3) || attention.dim(2) < 2)
    throw DimensionError("attention must be [F, H, n+1, n+1], got " + mascot::to_string(attention.shape()));
  const std::size_t F = attention.dim(0), H = attention.dim(1), T = attention.dim(2), n = T - 1;
  if (frames == 0) frames = F > frame_offset ? F - frame_offset : 0;
  if (a_s > a_e || a_e >= frames || frame_offset + frames > F)
    throw InputError("tube [" + std::to_string(a_s) + ", " + std::to_string(a_e) + "] outside " +
                     std::to_string(frames) + " frames");
  AttentionWeights out;
  out.a_s = a_s;
  out.a_e = a_e;
  out.w.assign(n, 0.0);
  const double norm = 1.0 / static_cast<double>(H * (a_e - a_s + 1));
  const auto a = attention.data();
  for (std::size_t f = a_s; f <= a_e; ++f)
    for (std::size_t h = 0; h < H; ++h) {
      const double* row0 = a.data() + (((frame_offset + f) * H + h) * T) * T;
      for (std::size_t j = 0; j < n; ++j) out.w[j] += row0[j + 1];
    }
  for (auto& x : out.w) x *= norm;
  return out;
}

std::pair<std::size_t, std::size_t> sample_tube(std::size_t frames, Rng& rng) {
  if (frames == 0) throw InputError("sample_tube: need at least one frame");
  // Pairs (i, j), i <= j, enumerated row by row: frames + (frames-1) + ... + 1.
  std::size_t k = rng.below(frames * (frames + 1) / 2);
  for (std::size_t i = 0; i < frames; ++i) {
    const std::size_t row = frames - i;
    if (k < row) return {i, i + k};
    k -= row;
  }
  return {frames - 1, frames - 1};
}

std::size_t mask_count(double ratio, std::size_t n) {
  if (!(ratio >= 0.0 && ratio <= 1.0)) throw ConfigError("mask ratio must lie in [0, 1]");
  const auto k = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(n) + 1e-9));
  return std::min(k, n);
}

TubeMask informed_mask(const AttentionWeights& weights, double ratio, MaskKind kind) {
  if (kind != MaskKind::kHigh && kind != MaskKind::kLow)
    throw ContractError("informed_mask: kind must be high or low");
  const std::size_t n = weights.w.size();
  const std::size_t k = mask_count(ratio, n);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  const auto& w = weights.w;
  if (kind == MaskKind::kHigh)
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return w[a] > w[b]; });
  else
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return w[a] < w[b]; });
  TubeMask m;
  m.kind = kind;
  m.ratio = ratio;
  m.a_s = weights.a_s;
  m.a_e = weights.a_e;
  m.patch_indices.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
  std::sort(m.patch_indices.begin(), m.patch_indices.end());
  return m;
}

namespace {

std::vector<std::size_t> random_subset(std::size_t n, std::size_t k, Rng& rng) {
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), 0);
  // Partial Fisher-Yates: the first k slots become a uniform k-subset.
  for (std::size_t i = 0; i < k; ++i) std::swap(all[i], all[i + rng.below(n - i)]);
  all.resize(k);
  std::sort(all.begin(), all.end());
  return all;
}

}  // namespace

FrameMasks random_frame_masks(std::size_t n, std::size_t frames, double ratio, Rng& rng) {
  const std::size_t k = mask_count(ratio, n);
  FrameMasks out;
  for (std::size_t f = 0; f < frames; ++f) out.per_frame.push_back(random_subset(n, k, rng));
  return out;
}

TubeMask random_tube_mask(std::size_t n, std::size_t frames, double ratio, Rng& rng) {
  const std::size_t k = mask_count(ratio, n);
  TubeMask m;
  m.kind = MaskKind::kRandomTube;
  m.ratio = ratio;
  std::tie(m.a_s, m.a_e) = sample_tube(frames, rng);
  m.patch_indices = random_subset(n, k, rng);
  return m;
}

BaselineMask baseline_mask(std::size_t n, std::size_t frames, double ratio, MaskKind kind, Rng& rng) {
  switch (kind) {
    case MaskKind::kRandom: return random_frame_masks(n, frames, ratio, rng);
    case MaskKind::kRandomTube: return random_tube_mask(n, frames, ratio, rng);
    default: throw ContractError("baseline_mask: kind must be random or random_tube");
  }
}

FrameMasks to_frame_masks(const TubeMask& mask, std::size_t frames) {
  FrameMasks out;
  out.per_frame.resize(frames);
  for (std::size_t f = 0; f < frames; ++f)
    if (mask.covers_frame(f)) out.per_frame[f] = mask.patch_indices;
  return out;
}

FrameMasks to_frame_masks(const BaselineMask& mask, std::size_t frames) {
  if (const auto* fm = std::get_if<FrameMasks>(&mask)) return *fm;
  return to_frame_masks(std::get<TubeMask>(mask), frames);
}

Tensor apply_pixel_mask(const Tensor& video, const FrameMasks& masks, std::size_t patch_size, Rng& rng) {
  if (video.rank() != 4 || video.dim(3) != 3) throw DimensionError("video must be [M, h, w, 3]");
  const std::size_t M = video.dim(0), h = video.dim(1), w = video.dim(2), p = patch_size;
  if (p == 0 || h % p != 0 || w % p != 0) throw ConfigError("patch size does not tile the frame");
  if (masks.per_frame.size() > M) throw InputError("more frame masks than frames");
  const std::size_t gw = w / p, n = (h / p) * gw;
  std::vector<double> px = video.values();
  for (std::size_t f = 0; f < masks.per_frame.size(); ++f)
    for (std::size_t patch : masks.per_frame[f]) {
      if (patch >= n) throw InputError("patch index " + std::to_string(patch) + " out of " + std::to_string(n));
      const std::size_t y0 = (patch / gw) * p, x0 = (patch % gw) * p;
      for (std::size_t dy = 0; dy < p; ++dy)
        for (std::size_t dx = 0; dx < p; ++dx)
          for (std::size_t c = 0; c < 3; ++c) px[((f * h + y0 + dy) * w + x0 + dx) * 3 + c] = rng.uniform();
    }
  return Tensor(video.shape(), std::move(px));
}

Tensor apply_pixel_mask(const Tensor& video, const TubeMask& mask, std::size_t patch_size, Rng& rng) {
  if (video.rank() != 4) throw DimensionError("video must be [M, h, w, 3]");
  return apply_pixel_mask(video, to_frame_masks(mask, video.dim(0)), patch_size, rng);
}

InteractionMask spatial_interaction_mask(std::span<const TokenFlag> flags) {
  if (flags.empty() || flags[0] != TokenFlag::kUnmasked)
    throw ContractError("spatial interaction mask: the CLS token (index 0) must be unmasked");
  const std::size_t T = flags.size();
  InteractionMask m{T, MaskLevel::kSpatial, std::vector<double>(T * T, 1.0)};
  for (std::size_t i = 0; i < T; ++i)
    for (std::size_t j = 0; j < T; ++j)
      if (flags[j] == TokenFlag::kMasked && i != j) m.u[i * T + j] = 0.0;
  return m;
}

InteractionMask temporal_interaction_mask(std::span<const TokenFlag> flags) {
  const std::size_t T = flags.size();
  InteractionMask m{T, MaskLevel::kTemporal, std::vector<double>(T * T, 1.0)};
  for (std::size_t i = 0; i < T; ++i)
    for (std::size_t j = 0; j < T; ++j)
      if (flags[i] == TokenFlag::kUnmasked && flags[j] == TokenFlag::kMasked) m.u[i * T + j] = 0.0;
  return m;
}

std::vector<TokenFlag> patch_flags(std::span<const std::size_t> masked_patches, std::size_t n) {
  std::vector<TokenFlag> flags(n + 1, TokenFlag::kUnmasked);
  for (std::size_t p : masked_patches) {
    if (p >= n) throw InputError("patch index " + std::to_string(p) + " out of " + std::to_string(n));
    flags[p + 1] = TokenFlag::kMasked;
  }
  return flags;
}

std::vector<TokenFlag> frame_flags(const FrameMasks& masks) {
  std::vector<TokenFlag> flags;
  flags.reserve(masks.per_frame.size());
  for (const auto& f : masks.per_frame) flags.push_back(f.empty() ? TokenFlag::kUnmasked : TokenFlag::kMasked);
  return flags;
}

}  // namespace mascot::masking
