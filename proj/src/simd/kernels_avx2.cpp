#include <immintrin.h>

#include "sqv/simd/kernels.hpp"

namespace sqv::simd::avx2 {

std::int32_t dot_i16(const std::int16_t* a, const std::int16_t* b, std::size_t n) {
  __m256i acc = _mm256_setzero_si256();
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    const __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
    const __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
    acc = _mm256_add_epi32(acc, _mm256_madd_epi16(va, vb));
  }
  __m128i s = _mm_add_epi32(_mm256_castsi256_si128(acc), _mm256_extracti128_si256(acc, 1));
  s = _mm_add_epi32(s, _mm_shuffle_epi32(s, _MM_SHUFFLE(1, 0, 3, 2)));
  s = _mm_add_epi32(s, _mm_shuffle_epi32(s, _MM_SHUFFLE(2, 3, 0, 1)));
  std::int32_t total = _mm_cvtsi128_si32(s);
  for (; i < n; ++i) total += static_cast<std::int32_t>(a[i]) * b[i];
  return total;
}

float sum_striped8(const float* v, std::size_t n) {
  __m256 acc = _mm256_setzero_ps();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) acc = _mm256_add_ps(acc, _mm256_loadu_ps(v + i));
  alignas(32) float lane[8];
  _mm256_store_ps(lane, acc);
  // Tail elements land in the lane they would occupy in the scalar emulation.
  for (; i < n; ++i) lane[i & 7] += v[i];
  const float s0 = lane[0] + lane[4];
  const float s1 = lane[1] + lane[5];
  const float s2 = lane[2] + lane[6];
  const float s3 = lane[3] + lane[7];
  return (s0 + s2) + (s1 + s3);
}

}  // namespace sqv::simd::avx2
