#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "mascot/colearning/config.hpp"
#include "mascot/encoders/config.hpp"

// Finite-difference check of the complete training objective on a 2-pair
// batch, every branch active.
//
// The tape gradient of the total loss is compared against
//   ∇_FD(L_rest) + γ·s ⊙ ∇_FD(L_adv)
// where L_rest is everything but the adversarial term, s = −λ for parameters
// upstream of the gradient reversal and +1 for the discriminator. Masks,
// replacement pixels and the stop-gradient targets are frozen at the
// unperturbed point so the probe sees the same function backward does.

namespace mascot::colearning {

struct ModelGradCheckOptions {
  std::uint64_t seed = 7;
  double h = 1e-5;
  /// Coordinates probed per parameter tensor: the largest-|gradient| one plus
  /// uniformly drawn others. 0 probes every coordinate.
  std::size_t coords_per_tensor = 3;
  /// Also probe one random direction over the whole parameter vector.
  bool directional = true;
};

struct TensorCheck {
  std::string name;
  std::size_t probed = 0;
  double max_rel_error = 0.0;
};

struct ModelGradCheckReport {
  std::vector<TensorCheck> tensors;
  double directional_rel_error = 0.0;
  /// Max over every probe, including the directional one.
  double max_rel_error = 0.0;
  std::size_t parameters = 0;
  std::size_t probes = 0;
};

/// Relative error is |tape − fd| / max(1, |tape|).
ModelGradCheckReport model_gradient_check(const encoders::EncoderConfig& model, const TrainConfig& train,
                                          const ModelGradCheckOptions& options = {});

}  // namespace mascot::colearning
