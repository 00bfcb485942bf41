#pragma once

#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

#include "sqv/tensor.hpp"

namespace sqv::quant {

enum class Scheme : std::uint8_t { symmetric, affine };

// Quantization granularity. Per-channel parameters index slices along `axis`
// (0 for conv weights [cout,...], 1 for transposed-conv weights [cin,cout,...]).
struct Granularity {
  bool per_channel = false;
  int axis = 0;

  static constexpr Granularity per_tensor() { return {false, 0}; }
  static constexpr Granularity per_channel_axis(int axis) { return {true, axis}; }
  constexpr bool operator==(const Granularity&) const = default;
};

// Symmetric: zero_point 0, integer range [-127, 127]. Affine: zero_point in
// [-128, 127], integer range [-128, 127].
struct QParams {
  Scheme scheme = Scheme::symmetric;
  Granularity granularity{};
  std::vector<float> scales;
  std::vector<std::int32_t> zero_points;

  int qmin() const { return scheme == Scheme::symmetric ? -127 : -128; }
  int qmax() const { return 127; }
  std::size_t slices() const { return scales.size(); }

  static QParams per_tensor(Scheme scheme, float scale, std::int32_t zero_point = 0) {
    return {scheme, Granularity::per_tensor(), {scale}, {zero_point}};
  }

  bool operator==(const QParams&) const = default;
};

// Round half to even; the single rounding rule used everywhere in this library.
double round_half_even(double v);

std::int8_t quantize_value(float x, float scale, std::int32_t zero_point, int qmin, int qmax);
float dequantize_value(std::int8_t q, float scale, std::int32_t zero_point);

// q = clamp(round_half_even(x / scale) + zero_point, qmin, qmax).
// Per-channel parameters must have one slice per extent of the tensor's axis.
TensorI8 quantize(const Tensor& t, const QParams& qp);
// x' = (q - zero_point) * scale.
Tensor dequantize(const TensorI8& t, const QParams& qp);

// Slice index of flat element `i` for tensors of `shape` under `qp`.
std::size_t slice_of(const Shape& shape, const Granularity& g, std::size_t i);

}  // namespace sqv::quant
