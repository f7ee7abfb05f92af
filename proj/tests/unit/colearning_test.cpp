#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <set>
#include <unordered_set>

#include "mascot/colearning/adam.hpp"
#include "mascot/colearning/checkpoint.hpp"
#include "mascot/colearning/config.hpp"
#include "mascot/colearning/model_gradcheck.hpp"
#include "mascot/colearning/pipeline.hpp"
#include "mascot/colearning/trainer.hpp"
#include "mascot/data/dataset.hpp"
#include "mascot/masking/masks.hpp"
#include "mascot/numerics/errors.hpp"
#include "test_util.hpp"

using namespace mascot;
using namespace mascot::colearning;
using mascot::testing::tiny_config;
namespace fs = std::filesystem;

namespace {

RunConfig tiny_run(std::size_t steps = 4) {
  RunConfig c;
  c.model = tiny_config();
  c.train.batch_size = 4;
  c.train.steps = steps;
  c.train.seed = 3;
  return c;
}

data::Dataset tiny_data(std::size_t count = 8) {
  const auto& m = tiny_config();
  return data::gen_dataset(count, 1, {m.n_frames, m.image_height, m.image_width});
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("mascot_colearning_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::vector<LossValues> train_losses(const RunConfig& cfg, const data::Dataset& ds) {
  Trainer t(cfg, ds);
  std::vector<LossValues> out;
  for (std::size_t s = 0; s < cfg.train.steps; ++s) out.push_back(t.step().losses);
  return out;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

TEST(CosineLr, EndpointsAndMidpoint) {
  EXPECT_EQ(cosine_lr(1e-3, 0, 100), 1e-3);
  EXPECT_NEAR(cosine_lr(1e-3, 50, 100), 5e-4, 1e-18);
  EXPECT_EQ(cosine_lr(1e-3, 100, 100), 0.0);
  EXPECT_EQ(cosine_lr(1e-3, 150, 100), 0.0);
}

TEST(Adam, ScalarMatchesHandRolledTrace) {
  Parameter p{"x", Tensor::vector({0.7}), false};
  AdamState st;
  const double grads[] = {0.3, -1.2, 0.05, 2.0, -0.4, 0.0, 0.9, -3.1};
  double x = 0.7, m = 0, v = 0;
  const double b1 = 0.9, b2 = 0.999, eps = 1e-8, lr = 0.01;
  for (int t = 1; t <= 8; ++t) {
    const double g = grads[t - 1];
    m = b1 * m + (1 - b1) * g;
    v = b2 * v + (1 - b2) * g * g;
    const double mh = m / (1 - std::pow(b1, t)), vh = v / (1 - std::pow(b2, t));
    x -= lr * mh / (std::sqrt(vh) + eps);
    const GradientRef ref{&p, std::span<const double>(&grads[t - 1], 1)};
    adam_update(std::span(&ref, 1), st, 0.0, lr);
    EXPECT_NEAR(p.value[0], x, 1e-12) << "t=" << t;
  }
  EXPECT_EQ(st.t, 8u);
}

TEST(Adam, ZeroGradientAndZeroRateLeaveParametersUnchanged) {
  Parameter p{"x", Tensor::vector({1.5, -2.0}), true};
  AdamState st;
  const std::vector<double> zero(2, 0.0), g{0.4, -0.1};
  GradientRef ref{&p, zero};
  adam_update(std::span(&ref, 1), st, 1e-2, 1e-2);
  EXPECT_EQ(p.value.values(), (std::vector<double>{1.5, -2.0}));
  ref.grad = g;
  adam_update(std::span(&ref, 1), st, cosine_lr(1e-2, 10, 10), 1e-2);
  EXPECT_EQ(p.value.values(), (std::vector<double>{1.5, -2.0}));
}

TEST(Adam, LearningRateGroups) {
  Parameter bb{"bb", Tensor::vector({0.0}), true}, nw{"nw", Tensor::vector({0.0}), false};
  AdamState st;
  const double g = 1.0;
  const GradientRef refs[] = {{&bb, std::span(&g, 1)}, {&nw, std::span(&g, 1)}};
  adam_update(refs, st, 1e-3, 1e-1);
  EXPECT_NEAR(bb.value[0], -1e-3, 1e-10);
  EXPECT_NEAR(nw.value[0], -1e-1, 1e-8);
}

TEST(Adam, NonFiniteGradientTouchesNothing) {
  Parameter a{"a", Tensor::vector({1.0}), false}, b{"b", Tensor::vector({2.0}), false};
  AdamState st;
  const double ok = 1.0, bad = NAN;
  const GradientRef refs[] = {{&a, std::span(&ok, 1)}, {&b, std::span(&bad, 1)}};
  EXPECT_THROW(adam_update(refs, st, 0.1, 0.1), InputError);
  EXPECT_EQ(a.value[0], 1.0);
  EXPECT_EQ(st.t, 0u);
  EXPECT_TRUE(st.moments.empty());
}

TEST(TrainConfig, DefaultsAndValidation) {
  const TrainConfig c;
  EXPECT_EQ(c.r_high, 0.7);
  EXPECT_EQ(c.r_low, 0.5);
  EXPECT_EQ(c.grl_lambda, 1.0);
  EXPECT_FALSE(c.sequential_branches);
  TrainConfig bad = c;
  bad.batch_size = 1;
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = c;
  bad.r_high = 1.5;
  EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(TrainConfig, JsonRoundTripAndUnknownKeys) {
  RunConfig c = tiny_run();
  c.train.strategy = MaskStrategy::kRandomTube;
  c.train.weights.gamma = 0.125;
  const RunConfig back = run_config_from_json(to_json(c));
  EXPECT_EQ(to_json(back).dump(), to_json(c).dump());
  EXPECT_EQ(config_hash(back), config_hash(c));
  EXPECT_NE(config_hash(RunConfig{}), config_hash(c));
  EXPECT_THROW(run_config_from_json(nlohmann::json{{"train", {{"lr", 1.0}}}}), ConfigError);
  EXPECT_THROW(run_config_from_json(nlohmann::json{{"trian", nlohmann::json::object()}}), ConfigError);
  EXPECT_THROW(parse_mask_strategy("smart"), ConfigError);
}

TEST(Pipeline, MaskPlanShapesAndRatios) {
  const RunConfig cfg = tiny_run();
  const data::Dataset ds = tiny_data();
  const auto model = encoders::ModelParams::init(cfg.model, 1);
  const data::Batch batch = data::make_batch(ds, {0, 1, 2});
  const UnmaskedPass u = encode_unmasked(nullptr, model, batch);
  const MaskPlan plan = plan_masks(u.attention_last, batch, cfg.train, cfg.model, 9);
  const std::size_t n = cfg.model.patches_per_frame(), M = cfg.model.n_frames, T = n + 1;
  ASSERT_EQ(plan.high.size(), 3u);
  EXPECT_EQ(plan.spatial_high.size(), 3 * M * T * T);
  EXPECT_EQ(plan.temporal_high.size(), 3 * M * M);
  for (std::size_t b = 0; b < 3; ++b) {
    for (const auto& f : plan.high[b].per_frame) EXPECT_TRUE(f.empty() || f.size() == masking::mask_count(0.7, n));
    for (const auto& f : plan.low[b].per_frame) EXPECT_TRUE(f.empty() || f.size() == masking::mask_count(0.5, n));
  }
  for (double px : plan.video_high.values()) {
    EXPECT_GE(px, 0.0);
    EXPECT_LE(px, 1.0);
  }
  // Same seed, same plan.
  const MaskPlan again = plan_masks(u.attention_last, batch, cfg.train, cfg.model, 9);
  EXPECT_TRUE(bit_equal(again.video_low, plan.video_low));
  EXPECT_EQ(again.spatial_low, plan.spatial_low);
}

TEST(Pipeline, DiscriminatorGradientsComeOnlyFromTheAdversarialTerm) {
  const RunConfig cfg = tiny_run();
  const data::Dataset ds = tiny_data();
  const auto model = encoders::ModelParams::init(cfg.model, 2);
  const data::Batch batch = data::make_batch(ds, {0, 1, 2, 3});
  Tape tape;
  const UnmaskedPass u = encode_unmasked(&tape, model, batch);
  const MaskPlan plan = plan_masks(u.attention_last, batch, cfg.train, cfg.model, 5);
  const auto parts = compute_losses(&tape, model, batch, u, plan, cfg.train);
  const auto disc = model.discriminator->parameters();
  for (const Tensor* loss : {&parts.vtc, &parts.vtc_h, &parts.vvc_h, &parts.vtc_l, &parts.vvc_l}) {
    const Gradients g = tape.backward(*loss);
    for (const Parameter* p : disc)
      for (double x : g.of(*p)) EXPECT_EQ(x, 0.0) << p->name;
  }
  const Gradients g = tape.backward(parts.adv);
  double norm = 0;
  for (const Parameter* p : disc)
    for (double x : g.of(*p)) norm += x * x;
  EXPECT_GT(norm, 0.0);
}

TEST(Pipeline, GrlReversesEncoderGradientsOfTheAdversarialTerm) {
  const RunConfig cfg = tiny_run();
  const data::Dataset ds = tiny_data();
  const auto model = encoders::ModelParams::init(cfg.model, 4);
  const data::Batch batch = data::make_batch(ds, {4, 5, 6, 7});
  auto grads = [&](bool use_grl) {
    Tape tape;
    const UnmaskedPass u = encode_unmasked(&tape, model, batch);
    const MaskPlan plan = plan_masks(u.attention_last, batch, cfg.train, cfg.model, 6);
    LossOptions opt;
    opt.use_grl = use_grl;
    const auto parts = compute_losses(&tape, model, batch, u, plan, cfg.train, opt);
    const Gradients g = tape.backward(parts.adv);
    std::vector<std::vector<double>> out;
    for (const Parameter* p : model.parameters()) out.push_back(g.of(*p));
    return out;
  };
  const auto with = grads(true), without = grads(false);
  std::unordered_set<const Parameter*> disc;
  for (const Parameter* p : model.discriminator->parameters()) disc.insert(p);
  const auto params = model.parameters();
  double moved = 0;
  for (std::size_t k = 0; k < params.size(); ++k) {
    const double sign = disc.count(params[k]) ? 1.0 : -1.0;
    for (std::size_t i = 0; i < with[k].size(); ++i) {
      EXPECT_NEAR(with[k][i], sign * without[k][i], 1e-10) << params[k]->name;
      if (!disc.count(params[k])) moved += std::abs(with[k][i]);
    }
  }
  EXPECT_GT(moved, 0.0);
}

TEST(Pipeline, DisabledBranchesContributeZero) {
  RunConfig cfg = tiny_run();
  cfg.train.enable_high = cfg.train.enable_low = false;
  const data::Dataset ds = tiny_data();
  const auto model = encoders::ModelParams::init(cfg.model, 7);
  const data::Batch batch = data::make_batch(ds, {0, 1});
  const UnmaskedPass u = encode_unmasked(nullptr, model, batch);
  const MaskPlan plan = plan_masks(u.attention_last, batch, cfg.train, cfg.model, 1);
  const auto parts = compute_losses(nullptr, model, batch, u, plan, cfg.train);
  EXPECT_GT(parts.vtc.item(), 0.0);
  for (const Tensor* t : {&parts.vtc_h, &parts.vvc_h, &parts.vtc_l, &parts.vvc_l, &parts.adv}) EXPECT_EQ(t->item(), 0.0);
}

TEST(Trainer, ZeroWeightsReproduceTheBaselineTraceBitForBit) {
  const data::Dataset ds = tiny_data();
  RunConfig zero = tiny_run(5);
  zero.train.weights = {0.0, 0.0, 0.0};
  RunConfig base = tiny_run(5);
  base.train.enable_high = base.train.enable_low = false;
  const auto a = train_losses(zero, ds), b = train_losses(base, ds);
  for (std::size_t s = 0; s < a.size(); ++s) {
    EXPECT_TRUE(same_bits(a[s].vtc, b[s].vtc)) << "step " << s;
    EXPECT_TRUE(same_bits(a[s].total, b[s].total)) << "step " << s;
  }
}

TEST(Trainer, SharingSurvivesSteps) {
  const data::Dataset ds = tiny_data();
  Trainer t(tiny_run(), ds);
  for (int s = 0; s < 3; ++s) {
    t.step();
    EXPECT_EQ(t.model().spatial.get(), t.model().co_encoder.get());
    EXPECT_EQ(t.model().video_h.get(), t.model().video_l.get());
  }
}

TEST(Trainer, StepsAreDeterministicAndMoveParameters) {
  const data::Dataset ds = tiny_data();
  const auto a = train_losses(tiny_run(), ds), b = train_losses(tiny_run(), ds);
  for (std::size_t s = 0; s < a.size(); ++s) EXPECT_EQ(a[s].json_line(), b[s].json_line());
  Trainer t(tiny_run(), ds);
  const auto before = t.model().clone();
  t.step();
  EXPECT_FALSE(bit_equal(before.spatial->patch_w.value, t.model().spatial->patch_w.value));
  EXPECT_FALSE(bit_equal(before.discriminator->w1.value, t.model().discriminator->w1.value));
  EXPECT_FALSE(bit_equal(before.reconstructor->wq.value, t.model().reconstructor->wq.value));
}

TEST(Trainer, SequentialBranchesIsADistinctSchedule) {
  const data::Dataset ds = tiny_data();
  RunConfig seq = tiny_run(3);
  seq.train.sequential_branches = true;
  Trainer a(seq, ds), b(tiny_run(3), ds);
  a.step();
  b.step();
  EXPECT_EQ(a.optimizer().t, 4u);
  EXPECT_EQ(b.optimizer().t, 1u);
  const auto la = a.step().losses;
  EXPECT_TRUE(std::isfinite(la.total));
}

TEST(Trainer, BatchesCycleThroughEpochs) {
  const data::Dataset ds = tiny_data(10);
  Trainer t(tiny_run(), ds);
  std::multiset<std::size_t> seen;
  for (std::size_t s = 0; s < 2; ++s)
    for (std::size_t i : t.batch_indices(s)) seen.insert(i);
  EXPECT_EQ(seen.size(), 8u);
  EXPECT_EQ(std::set<std::size_t>(seen.begin(), seen.end()).size(), 8u);
  EXPECT_EQ(t.batch_indices(2).size(), 4u);
}

TEST(Trainer, NonFiniteLossAbortsWithoutTouchingTheModel) {
  const bool checks = debug_checks();
  set_debug_checks(false);
  const data::Dataset ds = tiny_data();
  Trainer t(tiny_run(), ds);
  Parameter& w = t.model().spatial->patch_w;
  w.value = Tensor::filled(w.value.shape(), 1e308);
  const auto before = t.model().clone();
  EXPECT_THROW(t.step(), InputError);
  const auto pa = before.parameters(), pb = t.model().parameters();
  for (std::size_t i = 0; i < pa.size(); ++i) EXPECT_TRUE(bit_equal(pa[i]->value, pb[i]->value)) << pa[i]->name;
  EXPECT_EQ(t.step_index(), 0u);
  EXPECT_EQ(t.optimizer().t, 0u);
  set_debug_checks(checks);
}

TEST(Checkpoint, RoundTripIsBitIdentical) {
  const fs::path dir = scratch("roundtrip");
  const data::Dataset ds = tiny_data();
  Trainer t(tiny_run(), ds);
  t.step();
  t.step();
  save_checkpoint(dir / "a.ckpt", t.config(), t.model(), t.optimizer(), t.step_index());
  const Checkpoint ck = load_checkpoint(dir / "a.ckpt");
  EXPECT_EQ(ck.step, 2u);
  EXPECT_EQ(ck.optimizer.t, t.optimizer().t);
  EXPECT_EQ(ck.model.spatial.get(), ck.model.co_encoder.get());
  EXPECT_EQ(ck.model.video_h.get(), ck.model.video_l.get());
  const auto pa = t.model().parameters(), pb = ck.model.parameters();
  ASSERT_EQ(pa.size(), pb.size());
  for (std::size_t i = 0; i < pa.size(); ++i) {
    EXPECT_EQ(pa[i]->name, pb[i]->name);
    EXPECT_EQ(pa[i]->backbone, pb[i]->backbone);
    EXPECT_TRUE(bit_equal(pa[i]->value, pb[i]->value));
  }
  save_checkpoint(dir / "b.ckpt", ck.config, ck.model, ck.optimizer, ck.step);
  EXPECT_EQ(slurp(dir / "a.ckpt"), slurp(dir / "b.ckpt"));
}

TEST(Checkpoint, ResumedTrainingMatchesUninterrupted) {
  const fs::path dir = scratch("resume");
  const data::Dataset ds = tiny_data();
  const RunConfig cfg = tiny_run(5);
  Trainer full(cfg, ds);
  std::vector<std::string> ref;
  for (int s = 0; s < 5; ++s) ref.push_back(full.step().losses.json_line());
  save_checkpoint(dir / "full.ckpt", full.config(), full.model(), full.optimizer(), full.step_index());

  Trainer first(cfg, ds);
  for (int s = 0; s < 2; ++s) EXPECT_EQ(first.step().losses.json_line(), ref[s]);
  save_checkpoint(dir / "mid.ckpt", first.config(), first.model(), first.optimizer(), first.step_index());
  Checkpoint ck = load_checkpoint(dir / "mid.ckpt", cfg.model);
  Trainer resumed(ck.config, ds, std::move(ck.model), std::move(ck.optimizer), ck.step);
  for (int s = 2; s < 5; ++s) EXPECT_EQ(resumed.step().losses.json_line(), ref[s]);
  save_checkpoint(dir / "resumed.ckpt", resumed.config(), resumed.model(), resumed.optimizer(), resumed.step_index());
  EXPECT_EQ(slurp(dir / "full.ckpt"), slurp(dir / "resumed.ckpt"));
}

TEST(Checkpoint, MismatchedConfigAndCorruptionAreLoadErrors) {
  const fs::path dir = scratch("errors");
  const RunConfig cfg = tiny_run();
  const auto model = encoders::ModelParams::init(cfg.model, 1);
  save_checkpoint(dir / "c.ckpt", cfg, model, AdamState{}, 0);
  encoders::EncoderConfig other = cfg.model;
  other.d_model = 16;
  EXPECT_THROW(load_checkpoint(dir / "c.ckpt", other), LoadError);
  EXPECT_NO_THROW(load_checkpoint(dir / "c.ckpt", cfg.model));

  const std::string bytes = slurp(dir / "c.ckpt");
  std::ofstream(dir / "cut.ckpt", std::ios::binary) << bytes.substr(0, bytes.size() - 100);
  EXPECT_THROW(load_checkpoint(dir / "cut.ckpt"), LoadError);
  std::ofstream(dir / "junk.ckpt", std::ios::binary) << "{\"format\":\"something else\"}\n";
  EXPECT_THROW(load_checkpoint(dir / "junk.ckpt"), LoadError);
  std::ofstream(dir / "tail.ckpt", std::ios::binary) << bytes << "x";
  EXPECT_THROW(load_checkpoint(dir / "tail.ckpt"), LoadError);
  EXPECT_THROW(load_checkpoint(dir / "missing.ckpt"), LoadError);
}

TEST(Checkpoint, ShapeMismatchInsideTheFileIsRejected) {
  const fs::path dir = scratch("shape");
  const RunConfig cfg = tiny_run();
  encoders::ModelParams model = encoders::ModelParams::init(cfg.model, 1);
  model.spatial->cls.value = Tensor::zeros({2, cfg.model.d_model});
  save_checkpoint(dir / "s.ckpt", cfg, model, AdamState{}, 0);
  EXPECT_THROW(load_checkpoint(dir / "s.ckpt"), LoadError);
}

TEST(ModelGradCheck, TinyModelEveryCoordinate) {
  ModelGradCheckOptions opt;
  opt.coords_per_tensor = 0;
  const ModelGradCheckReport r = model_gradient_check(tiny_config(), TrainConfig{}, opt);
  EXPECT_EQ(r.probes, r.parameters + 1);
  EXPECT_LE(r.max_rel_error, 1e-4);
}
