#include "sqv/simd/kernels.hpp"

namespace sqv::simd::scalar {

std::int32_t dot_i16(const std::int16_t* a, const std::int16_t* b, std::size_t n) {
  std::int32_t acc = 0;
  for (std::size_t i = 0; i < n; ++i) acc += static_cast<std::int32_t>(a[i]) * b[i];
  return acc;
}

float sum_striped8(const float* v, std::size_t n) {
  float lane[8] = {0, 0, 0, 0, 0, 0, 0, 0};
  for (std::size_t i = 0; i < n; ++i) lane[i & 7] += v[i];
  const float s0 = lane[0] + lane[4];
  const float s1 = lane[1] + lane[5];
  const float s2 = lane[2] + lane[6];
  const float s3 = lane[3] + lane[7];
  return (s0 + s2) + (s1 + s3);
}

}  // namespace sqv::simd::scalar
