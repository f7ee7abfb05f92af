#include "mascot/colearning/model_gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_set>

#include "mascot/colearning/pipeline.hpp"
#include "mascot/colearning/trainer.hpp"
#include "mascot/data/dataset.hpp"
#include "mascot/numerics/errors.hpp"
#include "mascot/numerics/gradcheck.hpp"
#include "mascot/numerics/rng.hpp"

namespace mascot::colearning {

using encoders::ModelParams;

namespace {

constexpr std::uint64_t kProbeStream = 0x9C;

struct Split {
  double rest = 0.0;
  double adv = 0.0;
};

double rel_error(double analytic, double numeric) {
  return std::abs(analytic - numeric) / std::max(1.0, std::abs(analytic));
}

}  // namespace

ModelGradCheckReport model_gradient_check(const encoders::EncoderConfig& cfg, const TrainConfig& train_in,
                                          const ModelGradCheckOptions& opt) {
  if (!(opt.h >= 1e-7 && opt.h <= 1e-3)) throw ConfigError("gradcheck: h must lie in [1e-7, 1e-3]");
  TrainConfig train = train_in;
  train.enable_high = train.enable_low = true;
  train.validate();

  ModelParams model = ModelParams::init(cfg, derive_seed(opt.seed, kInitStream));
  const data::Dataset ds = data::gen_dataset(2, opt.seed, {cfg.n_frames, cfg.image_height, cfg.image_width});
  const data::Batch batch = data::make_batch(ds, {0, 1});
  const auto& w = train.weights;

  // Reference point: tape gradient, frozen masks and frozen targets.
  Tape tape;
  const UnmaskedPass ref = encode_unmasked(&tape, model, batch);
  const MaskPlan plan = plan_masks(ref.attention_last, batch, train, cfg, derive_seed(opt.seed, kMaskStream));
  const Tensor frozen = ref.video.detach();
  const LossOptions lopt{true, true, &frozen};
  const Tensor total = objectives::total_loss(compute_losses(&tape, model, batch, ref, plan, train, lopt), w);
  const Gradients grads = tape.backward(total);

  auto evaluate = [&]() {
    const UnmaskedPass u = encode_unmasked(nullptr, model, batch);
    const auto p = compute_losses(nullptr, model, batch, u, plan, train, lopt);
    return Split{p.vtc.item() + w.alpha * (p.vtc_h.item() + p.vvc_h.item()) +
                     w.beta * (p.vtc_l.item() + p.vvc_l.item()),
                 p.adv.item()};
  };

  const auto params = model.parameters();
  std::unordered_set<const Parameter*> disc;
  for (Parameter* p : model.discriminator->parameters()) disc.insert(p);
  auto sign = [&](const Parameter* p) { return disc.count(p) ? 1.0 : -train.grl_lambda; };

  ModelGradCheckReport rep;
  rep.parameters = model.parameter_count();
  Rng rng(derive_seed(opt.seed, kProbeStream));

  for (Parameter* p : params) {
    const std::vector<double> g = grads.of(*p);
    const std::vector<double> x0 = p->value.values();
    std::set<std::size_t> coords;
    if (opt.coords_per_tensor == 0 || opt.coords_per_tensor >= x0.size()) {
      for (std::size_t i = 0; i < x0.size(); ++i) coords.insert(i);
    } else {
      std::size_t arg = 0;
      for (std::size_t i = 1; i < g.size(); ++i)
        if (std::abs(g[i]) > std::abs(g[arg])) arg = i;
      coords.insert(arg);
      while (coords.size() < opt.coords_per_tensor) coords.insert(rng.below(x0.size()));
    }
    TensorCheck tc{p->name, coords.size(), 0.0};
    for (std::size_t i : coords) {
      std::vector<double> x = x0;
      x[i] = x0[i] + opt.h;
      p->value = Tensor(p->value.shape(), x);
      const Split plus = evaluate();
      x[i] = x0[i] - opt.h;
      p->value = Tensor(p->value.shape(), x);
      const Split minus = evaluate();
      p->value = Tensor(p->value.shape(), x0);
      const double numeric =
          (plus.rest - minus.rest) / (2 * opt.h) + w.gamma * sign(p) * (plus.adv - minus.adv) / (2 * opt.h);
      tc.max_rel_error = std::max(tc.max_rel_error, rel_error(g[i], numeric));
      ++rep.probes;
    }
    rep.max_rel_error = std::max(rep.max_rel_error, tc.max_rel_error);
    rep.tensors.push_back(std::move(tc));
  }

  if (opt.directional) {
    // Unit direction over the whole parameter vector.
    std::vector<std::vector<double>> dir, base;
    double norm = 0.0;
    for (Parameter* p : params) {
      base.push_back(p->value.values());
      std::vector<double> d(p->value.numel());
      for (double& v : d) {
        v = rng.normal();
        norm += v * v;
      }
      dir.push_back(std::move(d));
    }
    norm = std::sqrt(norm);
    double analytic = 0.0;
    for (std::size_t k = 0; k < params.size(); ++k) {
      const std::vector<double> g = grads.of(*params[k]);
      for (std::size_t i = 0; i < g.size(); ++i) {
        dir[k][i] /= norm;
        analytic += g[i] * dir[k][i];
      }
    }
    // Moves the selected subset of parameters by t along the direction.
    auto move = [&](double t, int subset) {
      for (std::size_t k = 0; k < params.size(); ++k) {
        const bool is_disc = disc.count(params[k]) > 0;
        const bool on = subset == 0 || (subset == 1 && !is_disc) || (subset == 2 && is_disc);
        std::vector<double> x = base[k];
        if (on)
          for (std::size_t i = 0; i < x.size(); ++i) x[i] += t * dir[k][i];
        params[k]->value = Tensor(params[k]->value.shape(), std::move(x));
      }
    };
    auto derivative = [&](int subset) {
      move(opt.h, subset);
      const Split plus = evaluate();
      move(-opt.h, subset);
      const Split minus = evaluate();
      move(0.0, 0);
      return Split{(plus.rest - minus.rest) / (2 * opt.h), (plus.adv - minus.adv) / (2 * opt.h)};
    };
    const double rest = derivative(0).rest;
    const double adv = -train.grl_lambda * derivative(1).adv + derivative(2).adv;
    rep.directional_rel_error = rel_error(analytic, rest + w.gamma * adv);
    rep.max_rel_error = std::max(rep.max_rel_error, rep.directional_rel_error);
    ++rep.probes;
  }
  return rep;
}

}  // namespace mascot::colearning
