#pragma once

#include <cstdint>
#include <span>

#include "sqv/quant/qparams.hpp"
#include "sqv/tensor.hpp"

namespace sqv::quant {

struct QConvOptions {
  int stride = 1;
  int padding = 0;
  bool relu = false;  // fused: clamp below at the output zero point
};

// Integer-only convolution:
//   acc = bias[o] + sum (q_a - zp_a) * (q_w - zp_w[o])   (exact int32)
//   out = apply_requant(acc, s_a * s_w[o] / s_out) + zp_out
// weight: [cout, cin, k, k]. bias is already at scale s_a * s_w[o].
// Activation and output parameters must be per-tensor; weights may be
// per-tensor or per-channel on axis 0. Throws RangeError if the layer's
// worst-case accumulator could exceed int32.
TensorI8 qconv2d(const TensorI8& act, const TensorI8& weight, std::span<const std::int32_t> bias,
                 const QParams& act_qp, const QParams& wt_qp, const QParams& out_qp, const QConvOptions& opt);

// Transposed counterpart; weight: [cin, cout, k, k], per-channel on axis 1.
TensorI8 qconv_transpose2d(const TensorI8& act, const TensorI8& weight, std::span<const std::int32_t> bias,
                           const QParams& act_qp, const QParams& wt_qp, const QParams& out_qp,
                           const QConvOptions& opt);

// Quantizes a float bias to int32 at scale s_act * s_wt[o], zero point 0.
std::vector<std::int32_t> quantize_bias(std::span<const float> bias, float act_scale, const QParams& wt_qp);

}  // namespace sqv::quant
