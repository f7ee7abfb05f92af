#include "mascot/encoders/model.hpp"

#include <cmath>

#include "mascot/numerics/errors.hpp"
#include "mascot/numerics/rng.hpp"

namespace mascot::encoders {

namespace {

class Initializer {
 public:
  explicit Initializer(std::uint64_t seed) : rng_(seed) {}

  Parameter normal(std::string name, Shape shape, double stddev, bool backbone) {
    std::vector<double> v(numel(shape));
    for (auto& x : v) x = stddev * rng_.normal();
    return {std::move(name), Tensor(std::move(shape), std::move(v)), backbone};
  }

  /// Weight [fan_in, fan_out] with std 1/√fan_in.
  Parameter weight(std::string name, std::size_t fan_in, std::size_t fan_out, bool backbone) {
    return normal(std::move(name), {fan_in, fan_out}, 1.0 / std::sqrt(static_cast<double>(fan_in)), backbone);
  }

  static Parameter constant(std::string name, Shape shape, double value, bool backbone) {
    return {std::move(name), Tensor::filled(std::move(shape), value), backbone};
  }

  BlockParams block(const std::string& prefix, std::size_t d, std::size_t mlp, bool backbone) {
    BlockParams b;
    b.ln1_gain = constant(prefix + ".ln1_gain", {d}, 1.0, backbone);
    b.ln1_bias = constant(prefix + ".ln1_bias", {d}, 0.0, backbone);
    b.wq = weight(prefix + ".wq", d, d, backbone);
    b.bq = constant(prefix + ".bq", {d}, 0.0, backbone);
    b.wk = weight(prefix + ".wk", d, d, backbone);
    b.bk = constant(prefix + ".bk", {d}, 0.0, backbone);
    b.wv = weight(prefix + ".wv", d, d, backbone);
    b.bv = constant(prefix + ".bv", {d}, 0.0, backbone);
    b.wo = weight(prefix + ".wo", d, d, backbone);
    b.bo = constant(prefix + ".bo", {d}, 0.0, backbone);
    b.ln2_gain = constant(prefix + ".ln2_gain", {d}, 1.0, backbone);
    b.ln2_bias = constant(prefix + ".ln2_bias", {d}, 0.0, backbone);
    b.w_fc = weight(prefix + ".w_fc", d, mlp, backbone);
    b.b_fc = constant(prefix + ".b_fc", {mlp}, 0.0, backbone);
    b.w_out = weight(prefix + ".w_out", mlp, d, backbone);
    b.b_out = constant(prefix + ".b_out", {d}, 0.0, backbone);
    return b;
  }

 private:
  Rng rng_;
};

template <typename T>
void append(std::vector<Parameter*>& out, T& part) {
  auto ps = part.parameters();
  out.insert(out.end(), ps.begin(), ps.end());
}

}  // namespace

std::vector<Parameter*> BlockParams::parameters() {
  return {&ln1_gain, &ln1_bias, &wq, &bq, &wk, &bk, &wv, &bv, &wo, &bo,
          &ln2_gain, &ln2_bias, &w_fc, &b_fc, &w_out, &b_out};
}

std::vector<Parameter*> VisionEncoderParams::parameters() {
  std::vector<Parameter*> out{&patch_w, &patch_b, &cls, &pos};
  for (auto& b : blocks) append(out, b);
  out.insert(out.end(), {&ln_post_gain, &ln_post_bias, &proj});
  return out;
}

std::vector<Parameter*> TextEncoderParams::parameters() {
  std::vector<Parameter*> out{&token_embedding, &pos};
  for (auto& b : blocks) append(out, b);
  out.insert(out.end(), {&ln_final_gain, &ln_final_bias, &proj});
  return out;
}

std::vector<Parameter*> TemporalEncoderParams::parameters() {
  std::vector<Parameter*> out{&pos};
  for (auto& b : blocks) append(out, b);
  return out;
}

std::vector<Parameter*> DiscriminatorParams::parameters() { return {&w1, &b1, &w2, &b2}; }

std::vector<Parameter*> WtiGateParams::parameters() { return {&text_w, &text_b, &video_w, &video_b}; }

ModelParams ModelParams::init(const EncoderConfig& config, std::uint64_t seed) {
  config.validate();
  ModelParams m(config);
  Initializer init(seed);
  const std::size_t d = config.d_model;
  const std::size_t mlp = d * config.mlp_ratio;

  auto vision = std::make_shared<VisionEncoderParams>();
  vision->patch_w = init.weight("spatial.patch_w", config.patch_dim(), d, true);
  vision->patch_b = Initializer::constant("spatial.patch_b", {d}, 0.0, true);
  vision->cls = init.normal("spatial.cls", {1, d}, 0.1, true);
  vision->pos = init.normal("spatial.pos", {config.spatial_seq_len(), d}, 0.1, true);
  for (std::size_t l = 0; l < config.n_layers; ++l)
    vision->blocks.push_back(init.block("spatial.blocks." + std::to_string(l), d, mlp, true));
  vision->ln_post_gain = Initializer::constant("spatial.ln_post_gain", {d}, 1.0, true);
  vision->ln_post_bias = Initializer::constant("spatial.ln_post_bias", {d}, 0.0, true);
  vision->proj = init.weight("spatial.proj", d, d, true);
  m.spatial = vision;
  m.co_encoder = vision;

  auto text = std::make_shared<TextEncoderParams>();
  text->token_embedding = init.normal("text.token_embedding", {config.vocab_size, d}, 0.5, true);
  text->pos = init.normal("text.pos", {config.text_len, d}, 0.1, true);
  for (std::size_t l = 0; l < config.text_layers; ++l)
    text->blocks.push_back(init.block("text.blocks." + std::to_string(l), d, mlp, true));
  text->ln_final_gain = Initializer::constant("text.ln_final_gain", {d}, 1.0, true);
  text->ln_final_bias = Initializer::constant("text.ln_final_bias", {d}, 0.0, true);
  text->proj = init.weight("text.proj", d, d, true);
  m.text = text;

  auto temporal = std::make_shared<TemporalEncoderParams>();
  temporal->pos = init.normal("temporal.pos", {config.n_frames, d}, 0.1, false);
  for (std::size_t l = 0; l < config.temporal_layers; ++l)
    temporal->blocks.push_back(init.block("temporal.blocks." + std::to_string(l), d, mlp, false));
  m.video_h = temporal;
  m.video_l = temporal;

  m.reconstructor = std::make_shared<BlockParams>(init.block("reconstructor", d, mlp, false));

  auto disc = std::make_shared<DiscriminatorParams>();
  const std::size_t hid = config.discriminator_hidden;
  disc->w1 = init.weight("discriminator.w1", d, hid, false);
  disc->b1 = Initializer::constant("discriminator.b1", {hid}, 0.0, false);
  disc->w2 = init.weight("discriminator.w2", hid, 2, false);
  disc->b2 = Initializer::constant("discriminator.b2", {2}, 0.0, false);
  m.discriminator = disc;

  auto wti = std::make_shared<WtiGateParams>();
  wti->text_w = Initializer::constant("wti.text_w", {d, 1}, 0.0, false);
  wti->text_b = Initializer::constant("wti.text_b", {1}, 0.0, false);
  wti->video_w = Initializer::constant("wti.video_w", {d, 1}, 0.0, false);
  wti->video_b = Initializer::constant("wti.video_b", {1}, 0.0, false);
  m.wti = wti;

  m.log_tau = std::make_shared<Parameter>(
      Initializer::constant("temperature.log_tau", {1}, std::log(kInitialTemperature), false));
  return m;
}

ModelParams ModelParams::clone() const {
  ModelParams m(config_);
  m.spatial = std::make_shared<VisionEncoderParams>(*spatial);
  m.co_encoder = co_encoder == spatial ? m.spatial : std::make_shared<VisionEncoderParams>(*co_encoder);
  m.text = std::make_shared<TextEncoderParams>(*text);
  m.video_h = std::make_shared<TemporalEncoderParams>(*video_h);
  m.video_l = video_l == video_h ? m.video_h : std::make_shared<TemporalEncoderParams>(*video_l);
  m.reconstructor = std::make_shared<BlockParams>(*reconstructor);
  m.discriminator = std::make_shared<DiscriminatorParams>(*discriminator);
  m.wti = std::make_shared<WtiGateParams>(*wti);
  m.log_tau = std::make_shared<Parameter>(*log_tau);
  return m;
}

std::vector<SharingGroup> ModelParams::groups() const {
  if (co_encoder != spatial || video_l != video_h)
    throw ContractError("model parameter sharing is broken: aliased roles hold different storage");
  std::vector<SharingGroup> g;
  g.push_back({"spatial", {"co_encoder"}, spatial->parameters()});
  g.push_back({"text", {}, text->parameters()});
  g.push_back({"temporal", {"h_completer.video_encoder", "l_completer.video_encoder"}, video_h->parameters()});
  g.push_back({"reconstructor", {}, reconstructor->parameters()});
  g.push_back({"discriminator", {}, discriminator->parameters()});
  g.push_back({"wti", {}, wti->parameters()});
  g.push_back({"temperature", {}, {log_tau.get()}});
  return g;
}

std::vector<Parameter*> ModelParams::parameters() const {
  std::vector<Parameter*> out;
  for (auto& grp : groups()) out.insert(out.end(), grp.parameters.begin(), grp.parameters.end());
  return out;
}

Parameter* ModelParams::find(const std::string& name) const {
  for (auto* p : parameters())
    if (p->name == name) return p;
  return nullptr;
}

std::size_t ModelParams::parameter_count() const {
  std::size_t n = 0;
  for (auto* p : parameters()) n += p->value.numel();
  return n;
}

}  // namespace mascot::encoders
