#include <cstdlib>
#include <cstring>

#include "sqv/simd/kernels.hpp"

namespace sqv::simd {

std::string_view isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

bool isa_available(Isa isa) {
  if (isa == Isa::scalar) return true;
#if defined(SQV_HAVE_AVX2_KERNELS)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

namespace {

Isa detect() {
  if (const char* forced = std::getenv("SQV_SIMD"); forced && std::strcmp(forced, "scalar") == 0) {
    return Isa::scalar;
  }
  return isa_available(Isa::avx2) ? Isa::avx2 : Isa::scalar;
}

using DotFn = std::int32_t (*)(const std::int16_t*, const std::int16_t*, std::size_t);
using SumFn = float (*)(const float*, std::size_t);

struct Table {
  DotFn dot;
  SumFn sum;
};

Table make_table() {
#if defined(SQV_HAVE_AVX2_KERNELS)
  if (detect() == Isa::avx2) return {avx2::dot_i16, avx2::sum_striped8};
#endif
  return {scalar::dot_i16, scalar::sum_striped8};
}

const Table& table() {
  static const Table t = make_table();
  return t;
}

}  // namespace

Isa active_isa() {
  static const Isa isa = detect();
  return isa;
}

std::int32_t dot_i16(std::span<const std::int16_t> a, std::span<const std::int16_t> b) {
  return table().dot(a.data(), b.data(), a.size() < b.size() ? a.size() : b.size());
}

float sum_striped8(std::span<const float> v) { return table().sum(v.data(), v.size()); }

}  // namespace sqv::simd
