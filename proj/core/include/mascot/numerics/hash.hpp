#pragma once

#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <span>
#include <string>
#include <string_view>

namespace mascot {

/// 64-bit FNV-1a, fed incrementally.
class Fnv1a {
 public:
  void bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h_ ^= p[i];
      h_ *= 0x100000001B3ULL;
    }
  }
  void text(std::string_view s) { bytes(s.data(), s.size()); }
  void doubles(std::span<const double> v) { bytes(v.data(), v.size_bytes()); }
  template <typename T>
  void value(const T& v) {
    bytes(&v, sizeof(T));
  }

  std::uint64_t digest() const { return h_; }
  std::string hex() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h_));
    return buf;
  }

 private:
  std::uint64_t h_ = 0xCBF29CE484222325ULL;
};

}  // namespace mascot
