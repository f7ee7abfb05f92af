#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>

#include "mascot/colearning/adam.hpp"
#include "mascot/colearning/config.hpp"
#include "mascot/encoders/model.hpp"

// Checkpoint file: one JSON manifest line (configs, step, sharing groups,
// record list) followed by .tns records "param/<name>", "adam_m/<name>" and
// "adam_v/<name>" in group order. Every byte is a function of the saved state.

namespace mascot::colearning {

struct Checkpoint {
  RunConfig config;
  encoders::ModelParams model;
  AdamState optimizer;
  std::size_t step = 0;
};

void save_checkpoint(const std::filesystem::path& path, const RunConfig& config, const encoders::ModelParams& model,
                     const AdamState& optimizer, std::size_t step);

/// Rebuilds the model with its aliases. When `expected` is given, a differing
/// model config is rejected. Throws LoadError; nothing is returned on failure.
Checkpoint load_checkpoint(const std::filesystem::path& path,
                           const std::optional<encoders::EncoderConfig>& expected = std::nullopt);

}  // namespace mascot::colearning
