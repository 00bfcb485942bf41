#pragma once

#include <cstdint>
#include <span>

#include "sqv/float_engine.hpp"
#include "sqv/tensor.hpp"

namespace sqv {

struct ConvParams {
  int stride = 1;
  int padding = 0;  // zero padding on every side
  // Identifies the layer for the ulp engine's position-stable perturbation.
  std::uint32_t layer = 0;
};

// Cross-correlation. weight: [cout, cin, k, k]; bias: cout values (or empty).
// Each output element is dot(bias, taps) with taps in (ic, ky, kx) order,
// padding taps skipped, evaluated under `engine`.
// Output extent per axis: floor((h + 2p - k) / s) + 1.
Tensor conv2d(const Tensor& input, const Tensor& weight, std::span<const float> bias, const ConvParams& params,
              const FloatEngine& engine);

// Transposed convolution. weight: [cin, cout, k, k] (the layout of the conv it
// inverts). Output extent per axis: (h - 1) * s - 2p + k. Evaluated in gather
// form with the same per-element engine contract as conv2d.
Tensor conv_transpose2d(const Tensor& input, const Tensor& weight, std::span<const float> bias,
                        const ConvParams& params, const FloatEngine& engine);

struct ConvGeometry {
  std::size_t cin, cout, k, out_h, out_w;
};

// Validates shapes; throws ShapeError naming the offending axes.
ConvGeometry conv_geometry(const Shape& input, const Shape& weight, std::size_t bias_len, int stride, int padding,
                           bool transposed);

}  // namespace sqv
