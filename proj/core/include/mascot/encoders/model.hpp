#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "mascot/encoders/config.hpp"
#include "mascot/numerics/tape.hpp"

namespace mascot::encoders {

/// Pre-norm transformer block: x + MSA(LN(x)), then x + MLP(LN(x)).
struct BlockParams {
  Parameter ln1_gain, ln1_bias;
  Parameter wq, bq, wk, bk, wv, bv;
  Parameter wo, bo;
  Parameter ln2_gain, ln2_bias;
  Parameter w_fc, b_fc, w_out, b_out;

  std::vector<Parameter*> parameters();
};

/// Spatial encoder; the co-encoder is the same object.
struct VisionEncoderParams {
  Parameter patch_w, patch_b;
  Parameter cls;
  Parameter pos;
  std::vector<BlockParams> blocks;
  Parameter ln_post_gain, ln_post_bias;
  Parameter proj;

  std::vector<Parameter*> parameters();
};

/// Causal text encoder over caption token ids.
struct TextEncoderParams {
  Parameter token_embedding;
  Parameter pos;
  std::vector<BlockParams> blocks;
  Parameter ln_final_gain, ln_final_bias;
  Parameter proj;

  std::vector<Parameter*> parameters();
};

/// Temporal video encoder over per-frame tokens.
struct TemporalEncoderParams {
  Parameter pos;
  std::vector<BlockParams> blocks;

  std::vector<Parameter*> parameters();
};

/// Mean-pool, Linear, GELU, Linear to {masked, unmasked} logits.
struct DiscriminatorParams {
  Parameter w1, b1, w2, b2;

  std::vector<Parameter*> parameters();
};

/// Per-token scalar gates for weighted token interaction.
struct WtiGateParams {
  Parameter text_w, text_b;
  Parameter video_w, video_b;

  std::vector<Parameter*> parameters();
};

/// Named set of parameters stored once; `aliases` are the other roles that
/// refer to the very same storage.
struct SharingGroup {
  std::string name;
  std::vector<std::string> aliases;
  std::vector<Parameter*> parameters;
};

/// Every trainable value of the model. Aliased roles hold the same pointer:
/// `co_encoder == spatial` and `video_l == video_h`.
class ModelParams {
 public:
  /// Random initialisation from `seed`.
  static ModelParams init(const EncoderConfig& config, std::uint64_t seed);

  ModelParams(ModelParams&&) = default;
  ModelParams& operator=(ModelParams&&) = default;
  ModelParams(const ModelParams&) = delete;
  ModelParams& operator=(const ModelParams&) = delete;

  /// Deep copy that keeps the alias structure.
  ModelParams clone() const;

  const EncoderConfig& config() const { return config_; }

  std::shared_ptr<VisionEncoderParams> spatial;
  std::shared_ptr<VisionEncoderParams> co_encoder;
  std::shared_ptr<TextEncoderParams> text;
  /// Temporal encoder on the unmasked path and inside the H-completer.
  std::shared_ptr<TemporalEncoderParams> video_h;
  /// Temporal encoder inside the L-completer.
  std::shared_ptr<TemporalEncoderParams> video_l;
  std::shared_ptr<BlockParams> reconstructor;
  std::shared_ptr<DiscriminatorParams> discriminator;
  std::shared_ptr<WtiGateParams> wti;
  /// log τ of the contrastive temperature.
  std::shared_ptr<Parameter> log_tau;

  /// Storage groups in a fixed order, each parameter listed exactly once.
  std::vector<SharingGroup> groups() const;
  /// Flattened groups().
  std::vector<Parameter*> parameters() const;
  Parameter* find(const std::string& name) const;
  std::size_t parameter_count() const;

 private:
  explicit ModelParams(EncoderConfig config) : config_(config) {}
  EncoderConfig config_;
};

inline constexpr double kInitialTemperature = 0.05;
inline constexpr double kMinTemperature = 0.001;
inline constexpr double kMaxTemperature = 0.5;

}  // namespace mascot::encoders
