#include "mascot/numerics/tensor_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <nlohmann/json.hpp>
#include <ostream>

#include "mascot/numerics/errors.hpp"

namespace mascot {

static_assert(std::endian::native == std::endian::little, ".tns payloads are written in native little-endian order");

void write_tns(std::ostream& out, const std::string& name, const Tensor& t) {
  nlohmann::json header;
  header["shape"] = t.shape();
  header["name"] = name;
  out << header.dump() << '\n';
  out.write(reinterpret_cast<const char*>(t.data().data()), static_cast<std::streamsize>(t.numel() * sizeof(double)));
  if (!out) throw std::runtime_error("failed writing tensor '" + name + "'");
}

NamedTensor read_tns(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw LoadError("missing .tns header");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw LoadError(std::string("bad .tns header: ") + e.what());
  }
  if (!header.contains("shape") || !header["shape"].is_array()) throw LoadError(".tns header has no shape");
  Shape shape = header["shape"].get<Shape>();
  std::string name = header.value("name", std::string{});
  std::vector<double> data(numel(shape));
  in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size() * sizeof(double)));
  if (static_cast<std::size_t>(in.gcount()) != data.size() * sizeof(double))
    throw LoadError("truncated .tns payload for '" + name + "'");
  try {
    return {std::move(name), Tensor(std::move(shape), std::move(data))};
  } catch (const std::exception& e) {
    throw LoadError(std::string("invalid tensor in .tns: ") + e.what());
  }
}

void save_tns(const std::filesystem::path& path, const std::string& name, const Tensor& t) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_tns(out, name, t);
}

NamedTensor load_tns(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open " + path.string());
  return read_tns(in);
}

}  // namespace mascot
