#pragma once

#include <cstdint>
#include <vector>

#include "sqv/entropy/lut.hpp"
#include "sqv/float_engine.hpp"
#include "sqv/tensor.hpp"

namespace sqv::codec {

struct HyperArch {
  std::uint8_t y_channels = 16;
  std::uint8_t z_channels = 8;
  float kappa = 4.0f;          // hyper-latent gain
  float carrier_gain = 256.0f;  // amplitude of the shared carrier channel
  float sigma_gain = 1.2f;
  float sigma_bias = -1.0f;

  std::size_t hidden() const { return y_channels + 1u; }
  std::size_t out_channels() const { return 2u * y_channels; }
  bool operator==(const HyperArch&) const = default;
};

// Float hyper networks, regenerated from a seed.
//   analysis:  conv 16->8 k3 s2, ReLU, conv 8->8 k3 s2 on log1p|gamma y|
//   synthesis: deconv 8->17 k4 s2, ReLU, deconv 17->32 k4 s2, ReLU, conv 32->32 k3
// The synthesis carries one strong smooth channel through every signal path
// and cancels it again in the last layer. Large partial sums make the final
// log-scale sensitive to accumulation order, which is the point.
struct HyperWeights {
  Tensor a1_w, a2_w;
  std::vector<float> a1_b, a2_b;
  Tensor s0_w, s1_w, s2_w;  // s0/s1 transposed: [cin, cout, k, k]
  std::vector<float> s0_b, s1_b, s2_b;
};

HyperWeights make_hyper_weights(const HyperArch& arch, std::uint64_t seed);

inline constexpr int kSynthesisStride = 2;
inline constexpr int kSynthesisDeconvKernel = 4;

// Engine layer ids: one block per sub-path so perturbations never collide.
inline constexpr std::uint32_t kIntraLayerBase = 0x10;
inline constexpr std::uint32_t kResidualLayerBase = 0x20;

// z = round(h_a(log1p|gamma y|)).
TensorI32 hyper_analysis(const Tensor& y, float gamma, const HyperWeights& w, const FloatEngine& engine,
                         std::uint32_t layer_base);

// Inputs of every synthesis layer plus its raw output, in float.
struct HyperActivations {
  Tensor z_hat, s1_in, s2_in, out;
};

HyperActivations hyper_synthesis(const TensorI32& z_hat, const HyperWeights& w, const FloatEngine& engine,
                                 std::uint32_t layer_base);

// Per-latent entropy parameters in raster (c, h, w) order.
struct EntropyParams {
  Shape shape;
  std::vector<float> mu;                // mean before rounding
  std::vector<std::int32_t> mu_shift;   // round_half_even(mu)
  std::vector<std::uint8_t> sigma_idx;  // row index into the LUT

  bool operator==(const EntropyParams&) const = default;
};

// Float mode: mu = raw, sigma index from clamp(exp(raw_sigma)).
EntropyParams map_float_params(const Tensor& raw, const entropy::EntropyLut& lut);

Tensor z_to_tensor(const TensorI32& z);

}  // namespace sqv::codec
