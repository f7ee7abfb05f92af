#include "mascot/data/synthetic.hpp"

#include <algorithm>
#include <cmath>

#include "mascot/numerics/errors.hpp"
#include "mascot/numerics/rng.hpp"

namespace mascot::data {

namespace {

constexpr const char* kShapeNames[] = {"square", "circle", "triangle"};
constexpr const char* kColorNames[] = {"red", "green", "blue", "yellow"};
constexpr const char* kMotionNames[] = {"left", "right", "up", "down", "still"};
constexpr const char* kSpeedNames[] = {"slow", "fast"};
constexpr const char* kBackgroundNames[] = {"plain", "striped"};

constexpr double kRgb[kColorCount][3] = {
    {0.95, 0.15, 0.15}, {0.15, 0.85, 0.2}, {0.2, 0.3, 0.95}, {0.95, 0.9, 0.15}};

constexpr double kPlainLevel = 0.1;
constexpr double kStripeLevel = 0.3;
constexpr std::size_t kStripeWidth = 4;

template <typename E>
std::size_t ord(E e) {
  return static_cast<std::size_t>(e);
}

std::uint32_t attr_token(std::uint32_t id, std::uint32_t base, std::size_t count, const char* what) {
  if (id < base || id >= base + count)
    throw InputError(std::string("caption: token ") + std::to_string(id) + " is not a " + what);
  return id - base;
}

struct Track {
  std::size_t size;
  long x0, y0, dx, dy;
};

/// Start corner and per-frame step. The start depends on motion and speed
/// only, so recolouring a scene never moves the shape.
Track track_for(const Scene& s, const VideoGeometry& g) {
  const std::size_t size = std::max<std::size_t>(2, (10 * std::min(g.height, g.width) + 16) / 32);
  const long span_x = static_cast<long>(g.width) - static_cast<long>(size);
  const long span_y = static_cast<long>(g.height) - static_cast<long>(size);
  const long steps = g.frames > 1 ? static_cast<long>(g.frames - 1) : 1;
  long v = s.speed == Speed::kSlow ? 2 : 4;
  Track t{size, span_x / 2, span_y / 2, 0, 0};
  auto fit = [&](long span) {
    const long step = std::min(v, std::max(0L, span) / steps);
    return std::pair{step, (span - step * steps) / 2};
  };
  switch (s.motion) {
    case Motion::kLeft: {
      auto [step, lo] = fit(span_x);
      t.dx = -step;
      t.x0 = lo + step * steps;
      break;
    }
    case Motion::kRight: {
      auto [step, lo] = fit(span_x);
      t.dx = step;
      t.x0 = lo;
      break;
    }
    case Motion::kUp: {
      auto [step, lo] = fit(span_y);
      t.dy = -step;
      t.y0 = lo + step * steps;
      break;
    }
    case Motion::kDown: {
      auto [step, lo] = fit(span_y);
      t.dy = step;
      t.y0 = lo;
      break;
    }
    case Motion::kStill: break;
  }
  return t;
}

bool inside(ShapeKind shape, std::size_t size, std::size_t dy, std::size_t dx) {
  const double c = static_cast<double>(size) / 2.0;
  const double y = static_cast<double>(dy) + 0.5, x = static_cast<double>(dx) + 0.5;
  switch (shape) {
    case ShapeKind::kSquare: return true;
    case ShapeKind::kCircle: return (x - c) * (x - c) + (y - c) * (y - c) <= c * c;
    case ShapeKind::kTriangle: return std::abs(x - c) <= 0.5 * (y + 0.5);
  }
  return false;
}

double background_level(Background bg, std::size_t x) {
  if (bg == Background::kPlain) return kPlainLevel;
  return (x / kStripeWidth) % 2 == 0 ? kPlainLevel : kStripeLevel;
}

}  // namespace

std::size_t Scene::index() const {
  std::size_t i = ord(shape);
  i = i * kColorCount + ord(color);
  i = i * kMotionCount + ord(motion);
  i = i * kSpeedCount + ord(speed);
  i = i * kBackgroundCount + ord(background);
  return i;
}

Scene Scene::from_index(std::size_t index) {
  if (index >= kSceneCount) throw InputError("scene index " + std::to_string(index) + " out of range");
  Scene s;
  s.background = static_cast<Background>(index % kBackgroundCount);
  index /= kBackgroundCount;
  s.speed = static_cast<Speed>(index % kSpeedCount);
  index /= kSpeedCount;
  s.motion = static_cast<Motion>(index % kMotionCount);
  index /= kMotionCount;
  s.color = static_cast<Color>(index % kColorCount);
  index /= kColorCount;
  s.shape = static_cast<ShapeKind>(index);
  return s;
}

std::string describe(const Scene& s) {
  return std::string(kColorNames[ord(s.color)]) + " " + kShapeNames[ord(s.shape)] + " " +
         kMotionNames[ord(s.motion)] + " " + kSpeedNames[ord(s.speed)] + " " + kBackgroundNames[ord(s.background)];
}

Caption caption_for(const Scene& s) {
  return {kSosId,
          kColorBase + static_cast<std::uint32_t>(s.color),
          kShapeBase + static_cast<std::uint32_t>(s.shape),
          kMotionBase + static_cast<std::uint32_t>(s.motion),
          kSpeedBase + static_cast<std::uint32_t>(s.speed),
          kBackgroundBase + static_cast<std::uint32_t>(s.background),
          kEosId};
}

Scene decode_caption(const Caption& c) {
  if (c.size() != kCaptionLength || c.front() != kSosId || c.back() != kEosId)
    throw InputError("caption: expected [SOS, color, shape, motion, speed, background, EOS]");
  Scene s;
  s.color = static_cast<Color>(attr_token(c[1], kColorBase, kColorCount, "color"));
  s.shape = static_cast<ShapeKind>(attr_token(c[2], kShapeBase, kShapeCount, "shape"));
  s.motion = static_cast<Motion>(attr_token(c[3], kMotionBase, kMotionCount, "motion"));
  s.speed = static_cast<Speed>(attr_token(c[4], kSpeedBase, kSpeedCount, "speed"));
  s.background = static_cast<Background>(attr_token(c[5], kBackgroundBase, kBackgroundCount, "background"));
  return s;
}

std::vector<double> shape_alpha(const Scene& scene, const VideoGeometry& g) {
  if (g.frames == 0 || g.height < 2 || g.width < 2) throw ConfigError("video geometry too small");
  const Track t = track_for(scene, g);
  std::vector<double> alpha(g.frames * g.height * g.width, 0.0);
  for (std::size_t f = 0; f < g.frames; ++f) {
    const long ox = t.x0 + t.dx * static_cast<long>(f), oy = t.y0 + t.dy * static_cast<long>(f);
    for (std::size_t dy = 0; dy < t.size; ++dy)
      for (std::size_t dx = 0; dx < t.size; ++dx) {
        const long y = oy + static_cast<long>(dy), x = ox + static_cast<long>(dx);
        if (y < 0 || x < 0 || y >= static_cast<long>(g.height) || x >= static_cast<long>(g.width)) continue;
        if (inside(scene.shape, t.size, dy, dx))
          alpha[(f * g.height + static_cast<std::size_t>(y)) * g.width + static_cast<std::size_t>(x)] = 1.0;
      }
  }
  return alpha;
}

Tensor render(const Scene& scene, const VideoGeometry& g) {
  const std::vector<double> alpha = shape_alpha(scene, g);
  const double* rgb = kRgb[ord(scene.color)];
  std::vector<double> px(alpha.size() * 3);
  for (std::size_t f = 0; f < g.frames; ++f)
    for (std::size_t y = 0; y < g.height; ++y)
      for (std::size_t x = 0; x < g.width; ++x) {
        const std::size_t i = (f * g.height + y) * g.width + x;
        const double bg = background_level(scene.background, x);
        for (std::size_t c = 0; c < 3; ++c) px[i * 3 + c] = alpha[i] > 0.0 ? rgb[c] : bg;
      }
  return Tensor({g.frames, g.height, g.width, 3}, std::move(px));
}

std::pair<Tensor, Caption> gen_pair(const Scene& scene, const VideoGeometry& geometry) {
  return {render(scene, geometry), caption_for(scene)};
}

std::pair<Tensor, Caption> gen_pair(std::uint64_t seed, const VideoGeometry& geometry) {
  Rng rng(seed);
  return gen_pair(Scene::from_index(rng.below(kSceneCount)), geometry);
}

}  // namespace mascot::data
