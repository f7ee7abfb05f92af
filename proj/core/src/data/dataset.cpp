#include "mascot/data/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mascot/numerics/errors.hpp"
#include "mascot/numerics/hash.hpp"
#include "mascot/numerics/rng.hpp"
#include "mascot/numerics/tensor_io.hpp"

namespace mascot::data {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::uint64_t kSceneStream = 0x5C3E;
constexpr std::uint64_t kEpochStream = 0xE90C;

}  // namespace

Dataset gen_dataset(std::size_t count, std::uint64_t seed, const VideoGeometry& geometry) {
  if (count == 0) throw ConfigError("gen_dataset: count must be at least 1");
  Rng rng(derive_seed(seed, kSceneStream));
  Dataset ds;
  ds.seed = seed;
  ds.geometry = geometry;
  if (count <= kSceneCount) {
    std::vector<std::size_t> ids(kSceneCount);
    std::iota(ids.begin(), ids.end(), 0);
    rng.shuffle(ids.begin(), ids.end());
    for (std::size_t i = 0; i < count; ++i) ds.scenes.push_back(Scene::from_index(ids[i]));
  } else {
    ds.warning = "requested " + std::to_string(count) + " pairs but only " + std::to_string(kSceneCount) +
                 " distinct scenes exist; sampled with replacement";
    for (std::size_t i = 0; i < count; ++i) ds.scenes.push_back(Scene::from_index(rng.below(kSceneCount)));
  }
  for (const Scene& s : ds.scenes) {
    auto [video, caption] = gen_pair(s, geometry);
    ds.videos.push_back(std::move(video));
    ds.captions.push_back(std::move(caption));
  }
  return ds;
}

std::string generation_hash(const Dataset& ds) {
  Fnv1a h;
  h.value(ds.seed);
  h.value(static_cast<std::uint64_t>(ds.size()));
  h.value(static_cast<std::uint64_t>(ds.geometry.frames));
  h.value(static_cast<std::uint64_t>(ds.geometry.height));
  h.value(static_cast<std::uint64_t>(ds.geometry.width));
  return h.hex();
}

std::string dataset_hash(const Dataset& ds) {
  Fnv1a h;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    h.value(static_cast<std::uint64_t>(ds.scenes[i].index()));
    for (std::uint32_t id : ds.captions[i]) h.value(id);
    h.doubles(ds.videos[i].data());
  }
  return h.hex();
}

void write_dataset(const Dataset& ds, const fs::path& dir) {
  fs::create_directories(dir / "pairs");
  json scenes = json::array();
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const std::string id = std::to_string(i);
    save_tns(dir / "pairs" / (id + ".tns"), id, ds.videos[i]);
    std::ofstream cap(dir / "pairs" / (id + ".cap"));
    for (std::uint32_t t : ds.captions[i]) cap << t << '\n';
    if (!cap) throw InputError("cannot write caption file for pair " + id);
    scenes.push_back({{"id", i}, {"scene", ds.scenes[i].index()}, {"description", describe(ds.scenes[i])}});
  }
  json manifest = {{"seed", ds.seed},
                   {"count", ds.size()},
                   {"geometry", {{"frames", ds.geometry.frames}, {"height", ds.geometry.height}, {"width", ds.geometry.width}}},
                   {"config_hash", generation_hash(ds)},
                   {"dataset_hash", dataset_hash(ds)},
                   {"scenes", std::move(scenes)}};
  if (!ds.warning.empty()) manifest["warning"] = ds.warning;
  std::ofstream out(dir / "manifest.json");
  out << manifest.dump(2) << '\n';
  if (!out) throw InputError("cannot write " + (dir / "manifest.json").string());
}

Dataset load_dataset(const fs::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw LoadError("no manifest.json in " + dir.string());
  Dataset ds;
  try {
    const json m = json::parse(in);
    ds.seed = m.at("seed").get<std::uint64_t>();
    const auto& g = m.at("geometry");
    ds.geometry = {g.at("frames").get<std::size_t>(), g.at("height").get<std::size_t>(),
                   g.at("width").get<std::size_t>()};
    if (m.contains("warning")) ds.warning = m.at("warning").get<std::string>();
    const auto& scenes = m.at("scenes");
    if (scenes.size() != m.at("count").get<std::size_t>()) throw LoadError("manifest count disagrees with scene list");
    for (std::size_t i = 0; i < scenes.size(); ++i) {
      if (scenes[i].at("id").get<std::size_t>() != i) throw LoadError("manifest ids must be 0..count-1 in order");
      ds.scenes.push_back(Scene::from_index(scenes[i].at("scene").get<std::size_t>()));
    }
  } catch (const json::exception& e) {
    throw LoadError("bad manifest in " + dir.string() + ": " + e.what());
  }
  const Shape expected{ds.geometry.frames, ds.geometry.height, ds.geometry.width, 3};
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const std::string id = std::to_string(i);
    NamedTensor v = load_tns(dir / "pairs" / (id + ".tns"));
    if (v.tensor.shape() != expected)
      throw LoadError("pair " + id + ": video shape " + to_string(v.tensor.shape()) + ", expected " + to_string(expected));
    std::ifstream cap(dir / "pairs" / (id + ".cap"));
    if (!cap) throw LoadError("pair " + id + ": missing caption file");
    Caption c;
    for (std::string line; std::getline(cap, line);) {
      if (line.empty()) continue;
      std::size_t used = 0;
      unsigned long t = 0;
      try {
        t = std::stoul(line, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != line.size()) throw LoadError("pair " + id + ": bad caption line '" + line + "'");
      c.push_back(static_cast<std::uint32_t>(t));
    }
    if (c != caption_for(ds.scenes[i])) throw LoadError("pair " + id + ": caption does not match its scene");
    ds.videos.push_back(std::move(v.tensor));
    ds.captions.push_back(std::move(c));
  }
  return ds;
}

Tensor Batch::video(std::size_t b) const {
  if (b >= size()) throw InputError("batch item out of range");
  const std::size_t per = videos.numel() / size();
  const auto d = videos.data();
  Shape shape = videos.shape();
  shape[0] = frames;
  return Tensor::unchecked(std::move(shape), std::vector<double>(d.begin() + b * per, d.begin() + (b + 1) * per));
}

Batch make_batch(const Dataset& ds, const std::vector<std::size_t>& indices) {
  if (indices.empty()) throw InputError("make_batch: empty index list");
  Batch batch;
  batch.frames = ds.geometry.frames;
  batch.indices = indices;
  std::vector<double> px;
  for (std::size_t i : indices) {
    if (i >= ds.size()) throw InputError("make_batch: index " + std::to_string(i) + " out of range");
    const auto v = ds.videos[i].data();
    px.insert(px.end(), v.begin(), v.end());
    batch.captions.push_back(ds.captions[i]);
  }
  batch.videos = Tensor::unchecked({indices.size() * ds.geometry.frames, ds.geometry.height, ds.geometry.width, 3},
                                   std::move(px));
  return batch;
}

std::vector<std::vector<std::size_t>> epoch_batches(std::size_t dataset_size, std::size_t batch_size,
                                                    std::uint64_t epoch_seed) {
  if (batch_size == 0 || batch_size > dataset_size)
    throw ConfigError("batch size " + std::to_string(batch_size) + " must lie in [1, " + std::to_string(dataset_size) + "]");
  std::vector<std::size_t> order(dataset_size);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed(epoch_seed, kEpochStream));
  rng.shuffle(order.begin(), order.end());
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t start = 0; start + batch_size <= dataset_size; start += batch_size)
    out.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(start),
                     order.begin() + static_cast<std::ptrdiff_t>(start + batch_size));
  return out;
}

std::vector<Batch> batches(const Dataset& ds, std::size_t batch_size, std::uint64_t epoch_seed) {
  std::vector<Batch> out;
  for (const auto& idx : epoch_batches(ds.size(), batch_size, epoch_seed)) out.push_back(make_batch(ds, idx));
  return out;
}

}  // namespace mascot::data
