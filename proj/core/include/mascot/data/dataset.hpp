#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mascot/data/synthetic.hpp"
#include "mascot/numerics/tensor.hpp"

namespace mascot::data {

struct Dataset {
  std::uint64_t seed = 0;
  VideoGeometry geometry;
  std::vector<Scene> scenes;
  /// One [M, h, w, 3] clip per scene.
  std::vector<Tensor> videos;
  std::vector<Caption> captions;
  /// Non-empty when sampling fell back to replacement.
  std::string warning;

  std::size_t size() const { return scenes.size(); }
};

/// `count` scenes, distinct while count <= 240, drawn by `seed`.
/// Throws ConfigError when count == 0.
Dataset gen_dataset(std::size_t count, std::uint64_t seed, const VideoGeometry& geometry = {});

/// Hex FNV-1a of the generation settings (seed, count, geometry).
std::string generation_hash(const Dataset& dataset);
/// Hex FNV-1a over scene ids, caption ids and video bytes.
std::string dataset_hash(const Dataset& dataset);

/// manifest.json + pairs/<id>.tns + pairs/<id>.cap under `dir`.
void write_dataset(const Dataset& dataset, const std::filesystem::path& dir);
/// Throws LoadError on a missing or inconsistent directory.
Dataset load_dataset(const std::filesystem::path& dir);

struct Batch {
  /// [B*M, h, w, 3], clip b occupying frames b*M .. b*M+M-1.
  Tensor videos;
  std::vector<Caption> captions;
  /// Dataset positions of the items.
  std::vector<std::size_t> indices;
  std::size_t frames = 0;

  std::size_t size() const { return indices.size(); }
  /// [M, h, w, 3] view of item b (a copy).
  Tensor video(std::size_t b) const;
};

/// Stacks the listed items.
Batch make_batch(const Dataset& dataset, const std::vector<std::size_t>& indices);

/// Index lists of one epoch: shuffled by epoch_seed, ragged remainder dropped.
/// Throws ConfigError when batch_size is 0 or exceeds the dataset.
std::vector<std::vector<std::size_t>> epoch_batches(std::size_t dataset_size, std::size_t batch_size,
                                                    std::uint64_t epoch_seed);

/// Materialised batches of one epoch.
std::vector<Batch> batches(const Dataset& dataset, std::size_t batch_size, std::uint64_t epoch_seed);

}  // namespace mascot::data
