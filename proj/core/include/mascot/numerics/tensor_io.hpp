#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "mascot/numerics/tensor.hpp"

// ".tns" records: one JSON header line {"shape":[...],"name":"..."} followed by
// numel() little-endian float64 values. Files may hold several records back
// to back.

namespace mascot {

struct NamedTensor {
  std::string name;
  Tensor tensor;
};

void write_tns(std::ostream& out, const std::string& name, const Tensor& t);
/// Throws LoadError on a malformed header or short payload.
NamedTensor read_tns(std::istream& in);

void save_tns(const std::filesystem::path& path, const std::string& name, const Tensor& t);
NamedTensor load_tns(const std::filesystem::path& path);

}  // namespace mascot
