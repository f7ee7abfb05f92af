#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "mascot/numerics/tape.hpp"

namespace mascot::colearning {

struct AdamHyper {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct Moments {
  std::vector<double> m, v;
};

struct AdamState {
  AdamHyper hyper;
  /// Number of updates applied so far.
  std::uint64_t t = 0;
  /// Keyed by parameter name.
  std::map<std::string, Moments> moments;
};

/// lr_base · ½(1 + cos(π·t/T)), clamped to 0 for t >= T.
double cosine_lr(double lr_base, std::uint64_t t, std::uint64_t horizon);

struct GradientRef {
  Parameter* param;
  std::span<const double> grad;
};

/// One Adam update over every listed parameter. Backbone parameters use
/// lr_backbone, the rest lr_new. Throws InputError on a non-finite gradient
/// before touching anything.
void adam_update(std::span<const GradientRef> grads, AdamState& state, double lr_backbone, double lr_new);

}  // namespace mascot::colearning
