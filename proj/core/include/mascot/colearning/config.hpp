#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "mascot/encoders/config.hpp"
#include "mascot/masking/types.hpp"
#include "mascot/objectives/losses.hpp"

namespace mascot::colearning {

/// How the H- and L-branch masks are chosen.
enum class MaskStrategy { kInformed, kRandom, kRandomTube };

std::string to_string(MaskStrategy s);
MaskStrategy parse_mask_strategy(const std::string& s);

struct TrainConfig {
  std::size_t batch_size = 16;
  std::size_t steps = 300;
  /// Frame and text encoders.
  double lr_backbone = 3e-4;
  /// Everything else: temporal encoder, reconstructor, discriminator, gates, τ.
  double lr_new = 3e-4;
  double r_high = 0.7;
  double r_low = 0.5;
  objectives::LossWeights weights;
  std::uint64_t seed = 0;
  /// Cosine horizon T; 0 means `steps`.
  std::size_t horizon = 0;
  double grl_lambda = 1.0;
  MaskStrategy strategy = MaskStrategy::kInformed;
  bool enable_high = true;
  bool enable_low = true;
  /// Four optimizer updates per step (one per branch) instead of one.
  bool sequential_branches = false;
  /// 0 disables periodic checkpoints.
  std::size_t checkpoint_every = 0;

  std::size_t cosine_horizon() const { return horizon ? horizon : steps; }
  void validate() const;
};

struct RunConfig {
  encoders::EncoderConfig model;
  TrainConfig train;
};

nlohmann::json to_json(const encoders::EncoderConfig& c);
nlohmann::json to_json(const TrainConfig& c);
nlohmann::json to_json(const RunConfig& c);

/// Missing keys keep their defaults; unknown keys throw ConfigError.
encoders::EncoderConfig encoder_config_from_json(const nlohmann::json& j);
TrainConfig train_config_from_json(const nlohmann::json& j);
/// {"model": {...}, "train": {...}}, both optional.
RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);

/// Hex FNV-1a of the canonical JSON dump.
std::string config_hash(const RunConfig& c);

}  // namespace mascot::colearning
