#include "mascot/colearning/config.hpp"

#include <fstream>

#include "mascot/numerics/errors.hpp"
#include "mascot/numerics/hash.hpp"

namespace mascot::colearning {

using nlohmann::json;

std::string to_string(MaskStrategy s) {
  switch (s) {
    case MaskStrategy::kInformed: return "informed";
    case MaskStrategy::kRandom: return "random";
    case MaskStrategy::kRandomTube: return "random_tube";
  }
  return "unknown";
}

MaskStrategy parse_mask_strategy(const std::string& s) {
  if (s == "informed") return MaskStrategy::kInformed;
  if (s == "random") return MaskStrategy::kRandom;
  if (s == "random_tube") return MaskStrategy::kRandomTube;
  throw ConfigError("unknown mask strategy '" + s + "' (informed, random, random_tube)");
}

void TrainConfig::validate() const {
  if (batch_size < 2) throw ConfigError("batch_size must be at least 2 for contrastive training");
  if (!(lr_backbone >= 0.0 && lr_new >= 0.0)) throw ConfigError("learning rates must be non-negative");
  if (!(r_high >= 0.0 && r_high <= 1.0 && r_low >= 0.0 && r_low <= 1.0))
    throw ConfigError("mask ratios must lie in [0, 1]");
  if (!(grl_lambda > 0.0)) throw ConfigError("grl_lambda must be positive");
  weights.validate();
}

json to_json(const encoders::EncoderConfig& c) {
  return {{"image_height", c.image_height},
          {"image_width", c.image_width},
          {"patch_size", c.patch_size},
          {"d_model", c.d_model},
          {"n_heads", c.n_heads},
          {"n_layers", c.n_layers},
          {"mlp_ratio", c.mlp_ratio},
          {"n_frames", c.n_frames},
          {"text_len", c.text_len},
          {"vocab_size", c.vocab_size},
          {"sos_id", c.sos_id},
          {"eos_id", c.eos_id},
          {"text_layers", c.text_layers},
          {"text_heads", c.text_heads},
          {"temporal_layers", c.temporal_layers},
          {"temporal_heads", c.temporal_heads},
          {"discriminator_hidden", c.discriminator_hidden},
          {"layer_norm_eps", c.layer_norm_eps},
          {"renormalize_gated_attention", c.renormalize_gated_attention}};
}

json to_json(const TrainConfig& c) {
  return {{"batch_size", c.batch_size},
          {"steps", c.steps},
          {"lr_backbone", c.lr_backbone},
          {"lr_new", c.lr_new},
          {"r_high", c.r_high},
          {"r_low", c.r_low},
          {"alpha", c.weights.alpha},
          {"beta", c.weights.beta},
          {"gamma", c.weights.gamma},
          {"seed", c.seed},
          {"horizon", c.horizon},
          {"grl_lambda", c.grl_lambda},
          {"strategy", to_string(c.strategy)},
          {"enable_high", c.enable_high},
          {"enable_low", c.enable_low},
          {"sequential_branches", c.sequential_branches},
          {"checkpoint_every", c.checkpoint_every}};
}

json to_json(const RunConfig& c) { return {{"model", to_json(c.model)}, {"train", to_json(c.train)}}; }

namespace {

template <typename T>
void take(const json& j, const char* key, T& field) {
  if (!j.contains(key)) return;
  try {
    field = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

void reject_unknown(const json& j, const json& known, const char* section) {
  if (!j.is_object()) throw ConfigError(std::string(section) + " config must be a JSON object");
  for (const auto& [key, _] : j.items())
    if (!known.contains(key)) throw ConfigError(std::string("unknown ") + section + " config key '" + key + "'");
}

}  // namespace

encoders::EncoderConfig encoder_config_from_json(const json& j) {
  encoders::EncoderConfig c;
  reject_unknown(j, to_json(c), "model");
  take(j, "image_height", c.image_height);
  take(j, "image_width", c.image_width);
  take(j, "patch_size", c.patch_size);
  take(j, "d_model", c.d_model);
  take(j, "n_heads", c.n_heads);
  take(j, "n_layers", c.n_layers);
  take(j, "mlp_ratio", c.mlp_ratio);
  take(j, "n_frames", c.n_frames);
  take(j, "text_len", c.text_len);
  take(j, "vocab_size", c.vocab_size);
  take(j, "sos_id", c.sos_id);
  take(j, "eos_id", c.eos_id);
  take(j, "text_layers", c.text_layers);
  take(j, "text_heads", c.text_heads);
  take(j, "temporal_layers", c.temporal_layers);
  take(j, "temporal_heads", c.temporal_heads);
  take(j, "discriminator_hidden", c.discriminator_hidden);
  take(j, "layer_norm_eps", c.layer_norm_eps);
  take(j, "renormalize_gated_attention", c.renormalize_gated_attention);
  c.validate();
  return c;
}

TrainConfig train_config_from_json(const json& j) {
  TrainConfig c;
  reject_unknown(j, to_json(c), "train");
  take(j, "batch_size", c.batch_size);
  take(j, "steps", c.steps);
  take(j, "lr_backbone", c.lr_backbone);
  take(j, "lr_new", c.lr_new);
  take(j, "r_high", c.r_high);
  take(j, "r_low", c.r_low);
  take(j, "alpha", c.weights.alpha);
  take(j, "beta", c.weights.beta);
  take(j, "gamma", c.weights.gamma);
  take(j, "seed", c.seed);
  take(j, "horizon", c.horizon);
  take(j, "grl_lambda", c.grl_lambda);
  std::string strategy = to_string(c.strategy);
  take(j, "strategy", strategy);
  c.strategy = parse_mask_strategy(strategy);
  take(j, "enable_high", c.enable_high);
  take(j, "enable_low", c.enable_low);
  take(j, "sequential_branches", c.sequential_branches);
  take(j, "checkpoint_every", c.checkpoint_every);
  c.validate();
  return c;
}

RunConfig run_config_from_json(const json& j) {
  reject_unknown(j, json{{"model", 0}, {"train", 0}}, "run");
  RunConfig c;
  c.model = encoder_config_from_json(j.value("model", json::object()));
  c.train = train_config_from_json(j.value("train", json::object()));
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  try {
    return run_config_from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
}

std::string config_hash(const RunConfig& c) {
  Fnv1a h;
  h.text(to_json(c).dump());
  return h.hex();
}

}  // namespace mascot::colearning
