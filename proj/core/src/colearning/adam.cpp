#include "mascot/colearning/adam.hpp"

#include <cmath>
#include <numbers>

#include "mascot/numerics/errors.hpp"

namespace mascot::colearning {

double cosine_lr(double lr_base, std::uint64_t t, std::uint64_t horizon) {
  if (horizon == 0 || t >= horizon) return 0.0;
  const double frac = static_cast<double>(t) / static_cast<double>(horizon);
  return lr_base * 0.5 * (1.0 + std::cos(std::numbers::pi * frac));
}

void adam_update(std::span<const GradientRef> grads, AdamState& state, double lr_backbone, double lr_new) {
  for (const auto& g : grads) {
    if (g.grad.size() != g.param->value.numel())
      throw DimensionError("adam: gradient size mismatch for " + g.param->name);
    if (!all_finite(g.grad)) throw InputError("adam: non-finite gradient for " + g.param->name);
  }
  ++state.t;
  const auto& h = state.hyper;
  const double c1 = 1.0 - std::pow(h.beta1, static_cast<double>(state.t));
  const double c2 = 1.0 - std::pow(h.beta2, static_cast<double>(state.t));
  for (const auto& g : grads) {
    Moments& mo = state.moments[g.param->name];
    const std::size_t n = g.grad.size();
    if (mo.m.empty()) {
      mo.m.assign(n, 0.0);
      mo.v.assign(n, 0.0);
    }
    const double lr = g.param->backbone ? lr_backbone : lr_new;
    std::vector<double> p = g.param->value.values();
    for (std::size_t i = 0; i < n; ++i) {
      mo.m[i] = h.beta1 * mo.m[i] + (1.0 - h.beta1) * g.grad[i];
      mo.v[i] = h.beta2 * mo.v[i] + (1.0 - h.beta2) * g.grad[i] * g.grad[i];
      p[i] -= lr * (mo.m[i] / c1) / (std::sqrt(mo.v[i] / c2) + h.eps);
    }
    g.param->value = Tensor(g.param->value.shape(), std::move(p));
  }
}

}  // namespace mascot::colearning
