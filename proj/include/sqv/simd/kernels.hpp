#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace sqv::simd {

// Inner loops of the integer hyper decoder and the host float engine. Each
// kernel has a scalar reference and (on x86-64) an AVX2 variant; the variant is
// chosen once at runtime. All variants return bit-identical results.

enum class Isa : std::uint8_t { scalar, avx2 };

std::string_view isa_name(Isa isa);

// Best ISA supported by the CPU, unless SQV_SIMD=scalar forces the fallback.
Isa active_isa();
bool isa_available(Isa isa);

namespace scalar {
// sum_i a[i] * b[i] in exact int32 arithmetic. n need not be a multiple of 16.
std::int32_t dot_i16(const std::int16_t* a, const std::int16_t* b, std::size_t n);
// Eight interleaved f32 partial sums (lane = i mod 8), folded as
// ((l0+l4)+(l2+l6)) + ((l1+l5)+(l3+l7)).
float sum_striped8(const float* v, std::size_t n);
}  // namespace scalar

#if defined(SQV_HAVE_AVX2_KERNELS)
namespace avx2 {
std::int32_t dot_i16(const std::int16_t* a, const std::int16_t* b, std::size_t n);
float sum_striped8(const float* v, std::size_t n);
}  // namespace avx2
#endif

// Dispatched entry points.
std::int32_t dot_i16(std::span<const std::int16_t> a, std::span<const std::int16_t> b);
float sum_striped8(std::span<const float> v);

}  // namespace sqv::simd
