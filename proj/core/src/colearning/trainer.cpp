#include "mascot/colearning/trainer.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <nlohmann/json.hpp>

#include "mascot/masking/masks.hpp"
#include "mascot/numerics/errors.hpp"
#include "mascot/numerics/ops.hpp"
#include "mascot/numerics/rng.hpp"

namespace mascot::colearning {

std::string LossValues::json_line() const {
  // Keys in the documented order rather than nlohmann's sorted order.
  nlohmann::ordered_json j;
  j["step"] = step;
  j["L_vtc"] = vtc;
  j["L_vtc_H"] = vtc_h;
  j["L_vvc_H"] = vvc_h;
  j["L_vtc_L"] = vtc_l;
  j["L_vvc_L"] = vvc_l;
  j["L_adv"] = adv;
  j["total"] = total;
  return j.dump();
}

Trainer::Trainer(RunConfig config, const data::Dataset& dataset)
    : config_(std::move(config)),
      dataset_(dataset),
      model_(encoders::ModelParams::init(config_.model, derive_seed(config_.train.seed, kInitStream))) {
  config_.train.validate();
  // Fail at construction rather than at the first step.
  data::epoch_batches(dataset_.size(), config_.train.batch_size, 0);
}

Trainer::Trainer(RunConfig config, const data::Dataset& dataset, encoders::ModelParams model, AdamState optimizer,
                 std::size_t step)
    : config_(std::move(config)),
      dataset_(dataset),
      model_(std::move(model)),
      optimizer_(std::move(optimizer)),
      step_(step) {
  config_.train.validate();
  data::epoch_batches(dataset_.size(), config_.train.batch_size, 0);
}

std::vector<std::size_t> Trainer::batch_indices(std::size_t step) const {
  const std::size_t per_epoch = dataset_.size() / config_.train.batch_size;
  const std::uint64_t epoch_seed = derive_seed(derive_seed(config_.train.seed, kBatchStream), step / per_epoch);
  return data::epoch_batches(dataset_.size(), config_.train.batch_size, epoch_seed)[step % per_epoch];
}

namespace {

double value(const Tensor& t) { return t.item(); }

}  // namespace

StepReport Trainer::step() {
  const TrainConfig& tc = config_.train;
  const encoders::EncoderConfig& mc = config_.model;
  const data::Batch batch = data::make_batch(dataset_, batch_indices(step_));

  Tape tape;
  const UnmaskedPass unmasked = encode_unmasked(&tape, model_, batch);
  const MaskPlan plan = plan_masks(unmasked.attention_last, batch, tc, mc,
                                   derive_seed(derive_seed(tc.seed, kMaskStream), step_));
  const objectives::LossParts parts = compute_losses(&tape, model_, batch, unmasked, plan, tc);
  const Tensor total = objectives::total_loss(parts, tc.weights);

  StepReport report;
  LossValues& lv = report.losses;
  lv.step = step_;
  lv.vtc = value(parts.vtc);
  lv.vtc_h = value(parts.vtc_h);
  lv.vvc_h = value(parts.vvc_h);
  lv.vtc_l = value(parts.vtc_l);
  lv.vvc_l = value(parts.vvc_l);
  lv.adv = value(parts.adv);
  lv.total = value(total);
  if (!std::isfinite(lv.total)) throw InputError("non-finite loss at step " + std::to_string(step_) + ": " + lv.json_line());

  for (std::size_t b = 0; b < batch.size(); ++b)
    report.cls_weights.push_back(
        masking::extract_cls_weights(unmasked.attention_last, 0, batch.frames - 1, b * batch.frames, batch.frames));

  const auto horizon = tc.cosine_horizon();
  const double lr_b = cosine_lr(tc.lr_backbone, step_, horizon);
  const double lr_n = cosine_lr(tc.lr_new, step_, horizon);
  const auto params = model_.parameters();
  auto apply = [&](const Tensor& loss) {
    const Gradients grads = tape.backward(loss);
    std::vector<std::vector<double>> storage;
    storage.reserve(params.size());
    std::vector<GradientRef> refs;
    refs.reserve(params.size());
    for (Parameter* p : params) {
      storage.push_back(grads.of(*p));
      refs.push_back({p, storage.back()});
    }
    adam_update(refs, optimizer_, lr_b, lr_n);
  };

  if (!tc.sequential_branches) {
    apply(total);
  } else {
    // One forward, then an update per branch in the order of the figure:
    // unmasked targets, H-completer, L-completer, discriminator.
    const auto& w = tc.weights;
    const std::array<Tensor, 2> h{parts.vtc_h, parts.vvc_h}, l{parts.vtc_l, parts.vvc_l};
    const std::array<double, 2> wa{w.alpha, w.alpha}, wb{w.beta, w.beta};
    const std::array<double, 1> wg{w.gamma};
    const std::array<Tensor, 1> adv{parts.adv};
    apply(parts.vtc);
    if (tc.enable_high) apply(weighted_sum(h, wa));
    if (tc.enable_low) {
      apply(weighted_sum(l, wb));
      apply(weighted_sum(adv, wg));
    }
  }

  Parameter& log_tau = *model_.log_tau;
  const double lo = std::log(encoders::kMinTemperature), hi = std::log(encoders::kMaxTemperature);
  if (log_tau.value.item() < lo || log_tau.value.item() > hi)
    log_tau.value = Tensor::scalar(std::clamp(log_tau.value.item(), lo, hi));

  ++step_;
  return report;
}

}  // namespace mascot::colearning
