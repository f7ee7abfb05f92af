#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mascot/colearning/adam.hpp"
#include "mascot/colearning/config.hpp"
#include "mascot/colearning/pipeline.hpp"
#include "mascot/data/dataset.hpp"
#include "mascot/encoders/model.hpp"
#include "mascot/masking/types.hpp"

namespace mascot::colearning {

/// Scalar loss values of one step.
struct LossValues {
  std::size_t step = 0;
  double vtc = 0, vtc_h = 0, vvc_h = 0, vtc_l = 0, vvc_l = 0, adv = 0, total = 0;

  /// {"step", "L_vtc", "L_vtc_H", "L_vvc_H", "L_vtc_L", "L_vvc_L", "L_adv", "total"} on one line.
  std::string json_line() const;
};

struct StepReport {
  LossValues losses;
  /// Per batch item, head-averaged CLS weights over all frames of the
  /// unmasked pass that produced this step's masks.
  std::vector<masking::AttentionWeights> cls_weights;
};

/// Seed streams. Keeping them apart lets a run with the branches disabled
/// consume exactly the same init and batch randomness as a full run.
inline constexpr std::uint64_t kInitStream = 1;
inline constexpr std::uint64_t kBatchStream = 2;
inline constexpr std::uint64_t kMaskStream = 3;

/// Owns the model, optimizer state and step counter of one training run.
class Trainer {
 public:
  Trainer(RunConfig config, const data::Dataset& dataset);
  /// Resume from a restored model and optimizer at `step`.
  Trainer(RunConfig config, const data::Dataset& dataset, encoders::ModelParams model, AdamState optimizer,
          std::size_t step);

  /// Runs one co-learning step on the next batch. Throws InputError, with the
  /// loss breakdown in the message, if the loss is non-finite; the model is
  /// left unchanged in that case.
  StepReport step();

  std::size_t step_index() const { return step_; }
  const RunConfig& config() const { return config_; }
  const encoders::ModelParams& model() const { return model_; }
  encoders::ModelParams& model() { return model_; }
  const AdamState& optimizer() const { return optimizer_; }

  /// Dataset positions of the batch used at `step`.
  std::vector<std::size_t> batch_indices(std::size_t step) const;

 private:
  RunConfig config_;
  const data::Dataset& dataset_;
  encoders::ModelParams model_;
  AdamState optimizer_;
  std::size_t step_ = 0;
};

}  // namespace mascot::colearning
