#include "mascot/colearning/checkpoint.hpp"

#include <fstream>
#include <map>
#include <string>

#include <nlohmann/json.hpp>

#include "mascot/numerics/errors.hpp"
#include "mascot/numerics/tensor_io.hpp"

namespace mascot::colearning {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kFormat = "mascot-checkpoint";
constexpr int kVersion = 1;

json groups_json(const encoders::ModelParams& model) {
  json out = json::array();
  for (const auto& g : model.groups()) {
    json names = json::array();
    for (const Parameter* p : g.parameters) names.push_back(p->name);
    out.push_back({{"name", g.name}, {"aliases", g.aliases}, {"parameters", std::move(names)}});
  }
  return out;
}

Tensor moment_tensor(const AdamState& opt, const Parameter& p, bool second) {
  const auto it = opt.moments.find(p.name);
  if (it == opt.moments.end()) return Tensor::zeros(p.value.shape());
  return Tensor(p.value.shape(), second ? it->second.v : it->second.m);
}

}  // namespace

void save_checkpoint(const fs::path& path, const RunConfig& config, const encoders::ModelParams& model,
                     const AdamState& optimizer, std::size_t step) {
  const auto params = model.parameters();
  json manifest = {{"format", kFormat},
                   {"version", kVersion},
                   {"step", step},
                   {"config", to_json(config)},
                   {"adam", {{"t", optimizer.t},
                             {"beta1", optimizer.hyper.beta1},
                             {"beta2", optimizer.hyper.beta2},
                             {"eps", optimizer.hyper.eps}}},
                   {"groups", groups_json(model)},
                   {"records", params.size() * 3}};
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  // Write beside the target and rename so a crash never leaves half a file.
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw InputError("cannot write checkpoint " + tmp.string());
    out << manifest.dump() << '\n';
    for (const Parameter* p : params) {
      write_tns(out, "param/" + p->name, p->value);
      write_tns(out, "adam_m/" + p->name, moment_tensor(optimizer, *p, false));
      write_tns(out, "adam_v/" + p->name, moment_tensor(optimizer, *p, true));
    }
    if (!out) throw InputError("short write on checkpoint " + tmp.string());
  }
  fs::rename(tmp, path);
}

namespace {

Checkpoint load_impl(const fs::path& path, const std::optional<encoders::EncoderConfig>& expected) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open checkpoint " + path.string());
  std::string header;
  std::getline(in, header);
  json manifest;
  RunConfig config;
  try {
    manifest = json::parse(header);
    if (manifest.at("format") != kFormat || manifest.at("version") != kVersion)
      throw LoadError("unsupported checkpoint format in " + path.string());
    config = run_config_from_json(manifest.at("config"));
  } catch (const json::exception& e) {
    throw LoadError("bad checkpoint manifest in " + path.string() + ": " + e.what());
  } catch (const ConfigError& e) {
    throw LoadError("bad config in checkpoint " + path.string() + ": " + e.what());
  }
  if (expected && to_json(*expected) != to_json(config.model))
    throw LoadError("checkpoint model config differs from the requested one:\n  checkpoint " +
                    to_json(config.model).dump() + "\n  requested  " + to_json(*expected).dump());

  // Build into fresh objects; the caller only sees them if everything checks out.
  encoders::ModelParams model = encoders::ModelParams::init(config.model, 0);
  if (groups_json(model) != manifest.at("groups"))
    throw LoadError("checkpoint sharing groups do not match the model layout");
  AdamState opt;
  opt.t = manifest.at("adam").at("t").get<std::uint64_t>();
  opt.hyper = {manifest.at("adam").at("beta1").get<double>(), manifest.at("adam").at("beta2").get<double>(),
               manifest.at("adam").at("eps").get<double>()};

  const auto params = model.parameters();
  if (manifest.at("records").get<std::size_t>() != params.size() * 3)
    throw LoadError("checkpoint record count does not match the model");
  std::map<std::string, Tensor> records;
  for (std::size_t i = 0; i < params.size() * 3; ++i) {
    NamedTensor r = read_tns(in);
    if (!records.emplace(r.name, std::move(r.tensor)).second) throw LoadError("duplicate record " + r.name);
  }
  if (in.peek() != std::char_traits<char>::eof()) throw LoadError("trailing bytes after checkpoint records");

  std::map<std::string, Tensor> values;
  for (Parameter* p : params) {
    auto take = [&](const std::string& prefix) {
      const auto it = records.find(prefix + p->name);
      if (it == records.end()) throw LoadError("checkpoint lacks record " + prefix + p->name);
      if (it->second.shape() != p->value.shape())
        throw LoadError("record " + prefix + p->name + " has shape " + mascot::to_string(it->second.shape()) + ", model expects " +
                        mascot::to_string(p->value.shape()));
      return it->second;
    };
    values.emplace(p->name, take("param/"));
    opt.moments[p->name] = {take("adam_m/").values(), take("adam_v/").values()};
  }
  for (Parameter* p : params) p->value = values.at(p->name);
  return {std::move(config), std::move(model), std::move(opt), manifest.at("step").get<std::size_t>()};
}

}  // namespace

Checkpoint load_checkpoint(const fs::path& path, const std::optional<encoders::EncoderConfig>& expected) {
  try {
    return load_impl(path, expected);
  } catch (const nlohmann::json::exception& e) {
    throw LoadError("bad checkpoint manifest in " + path.string() + ": " + e.what());
  }
}

}  // namespace mascot::colearning
