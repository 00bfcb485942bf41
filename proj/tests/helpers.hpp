#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "sqv/common/rng.hpp"
#include "sqv/tensor.hpp"

namespace sqvtest {

inline sqv::Tensor random_tensor(sqv::Shape s, std::uint64_t seed, double lo = -10.0, double hi = 10.0) {
  sqv::Rng rng(seed);
  std::vector<float> v(s.numel());
  for (auto& x : v) x = static_cast<float>(lo + (hi - lo) * rng.uniform());
  return sqv::Tensor(s, std::move(v));
}

inline std::uint32_t bits_of(float f) {
  std::uint32_t u;
  std::memcpy(&u, &f, 4);
  return u;
}

// Distance in representable floats (same sign assumed).
inline long long ulp_distance(float a, float b) {
  auto ord = [](float f) {
    const auto u = static_cast<std::int64_t>(bits_of(f));
    return (u & 0x80000000) ? -(u & 0x7fffffff) : u;
  };
  const long long d = ord(a) - ord(b);
  return d < 0 ? -d : d;
}

inline std::filesystem::path vectors_dir() { return SQV_TEST_VECTORS_DIR; }

// Set SQV_WRITE_GOLDEN=1 to regenerate checked-in vectors.
inline bool write_golden() {
  const char* e = std::getenv("SQV_WRITE_GOLDEN");
  return e && std::string(e) == "1";
}

inline std::string to_hex(const std::vector<std::uint8_t>& b) {
  static const char* d = "0123456789abcdef";
  std::string s;
  for (std::size_t i = 0; i < b.size(); ++i) {
    s += d[b[i] >> 4];
    s += d[b[i] & 15];
    if (i % 32 == 31) s += '\n';
  }
  if (!s.empty() && s.back() != '\n') s += '\n';
  return s;
}

inline std::vector<std::uint8_t> from_hex(const std::string& s) {
  std::vector<std::uint8_t> out;
  int hi = -1;
  for (char c : s) {
    int v;
    if (c >= '0' && c <= '9') v = c - '0';
    else if (c >= 'a' && c <= 'f') v = c - 'a' + 10;
    else continue;
    if (hi < 0) {
      hi = v;
    } else {
      out.push_back(static_cast<std::uint8_t>(hi * 16 + v));
      hi = -1;
    }
  }
  return out;
}

}  // namespace sqvtest
