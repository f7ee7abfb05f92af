#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mascot/numerics/tensor.hpp"

namespace mascot::data {

enum class ShapeKind : std::uint8_t { kSquare, kCircle, kTriangle };
enum class Color : std::uint8_t { kRed, kGreen, kBlue, kYellow };
enum class Motion : std::uint8_t { kLeft, kRight, kUp, kDown, kStill };
enum class Speed : std::uint8_t { kSlow, kFast };
enum class Background : std::uint8_t { kPlain, kStriped };

inline constexpr std::size_t kShapeCount = 3;
inline constexpr std::size_t kColorCount = 4;
inline constexpr std::size_t kMotionCount = 5;
inline constexpr std::size_t kSpeedCount = 2;
inline constexpr std::size_t kBackgroundCount = 2;
inline constexpr std::size_t kSceneCount = kShapeCount * kColorCount * kMotionCount * kSpeedCount * kBackgroundCount;

/// Caption vocabulary: PAD, SOS, EOS, then one id per attribute value.
inline constexpr std::uint32_t kPadId = 0;
inline constexpr std::uint32_t kSosId = 1;
inline constexpr std::uint32_t kEosId = 2;
inline constexpr std::uint32_t kColorBase = 3;
inline constexpr std::uint32_t kShapeBase = kColorBase + kColorCount;
inline constexpr std::uint32_t kMotionBase = kShapeBase + kShapeCount;
inline constexpr std::uint32_t kSpeedBase = kMotionBase + kMotionCount;
inline constexpr std::uint32_t kBackgroundBase = kSpeedBase + kSpeedCount;
inline constexpr std::uint32_t kVocabSize = kBackgroundBase + kBackgroundCount;
inline constexpr std::size_t kCaptionLength = 7;

using Caption = std::vector<std::uint32_t>;

struct Scene {
  ShapeKind shape = ShapeKind::kSquare;
  Color color = Color::kRed;
  Motion motion = Motion::kStill;
  Speed speed = Speed::kSlow;
  Background background = Background::kPlain;

  /// Mixed-radix index in [0, kSceneCount).
  std::size_t index() const;
  static Scene from_index(std::size_t index);

  bool operator==(const Scene&) const = default;
};

std::string describe(const Scene& scene);

/// [SOS, color, shape, motion, speed, background, EOS].
Caption caption_for(const Scene& scene);
/// Inverse of caption_for; throws InputError on a malformed caption.
Scene decode_caption(const Caption& caption);

struct VideoGeometry {
  std::size_t frames = 6;
  std::size_t height = 32;
  std::size_t width = 32;
};

/// Shape coverage per frame [M, h, w] in {0, 1}; independent of color and background.
std::vector<double> shape_alpha(const Scene& scene, const VideoGeometry& geometry);

/// Video [M, h, w, 3] with values in [0, 1].
Tensor render(const Scene& scene, const VideoGeometry& geometry);

std::pair<Tensor, Caption> gen_pair(const Scene& scene, const VideoGeometry& geometry);
/// Scene drawn uniformly from the 240 combinations by `seed`.
std::pair<Tensor, Caption> gen_pair(std::uint64_t seed, const VideoGeometry& geometry);

}  // namespace mascot::data
