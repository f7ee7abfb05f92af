#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace mascot::masking {

enum class TokenFlag : std::uint8_t { kUnmasked, kMasked };

enum class MaskLevel { kSpatial, kTemporal };

/// Binary token-by-token gate multiplied into post-softmax attention.
/// Row i is the query, column j the key; 1 keeps the interaction.
struct InteractionMask {
  std::size_t size = 0;
  MaskLevel level = MaskLevel::kSpatial;
  std::vector<double> u;

  double operator()(std::size_t i, std::size_t j) const { return u[i * size + j]; }
};

enum class MaskKind { kHigh, kLow, kRandom, kRandomTube };

std::string to_string(MaskKind kind);
MaskKind parse_mask_kind(const std::string& s);

/// CLS-to-patch attention weights averaged over heads and over a frame range.
struct AttentionWeights {
  std::vector<double> w;
  std::size_t a_s = 0;
  std::size_t a_e = 0;
};

/// Spatial patch set erased on every frame of [a_s, a_e].
struct TubeMask {
  MaskKind kind = MaskKind::kHigh;
  double ratio = 0.0;
  std::size_t a_s = 0;
  std::size_t a_e = 0;
  /// Sorted, unique, each < n.
  std::vector<std::size_t> patch_indices;

  bool covers_frame(std::size_t f) const { return f >= a_s && f <= a_e; }
};

/// One patch set per frame, for the independent random baseline.
struct FrameMasks {
  std::vector<std::vector<std::size_t>> per_frame;
};

}  // namespace mascot::masking
