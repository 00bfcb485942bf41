#include "sqv/codec/hyper.hpp"

#include <algorithm>
#include <cmath>

#include "sqv/common/rng.hpp"
#include "sqv/conv.hpp"
#include "sqv/quant/qparams.hpp"

namespace sqv::codec {

namespace {

constexpr float kK3[3][3] = {{1 / 16.f, 2 / 16.f, 1 / 16.f}, {2 / 16.f, 4 / 16.f, 2 / 16.f}, {1 / 16.f, 2 / 16.f, 1 / 16.f}};
constexpr float kBilinear[4] = {0.25f, 0.75f, 0.75f, 0.25f};

float jitter(Rng& rng, double amount) { return static_cast<float>(1.0 + amount * rng.symmetric()); }

}  // namespace

HyperWeights make_hyper_weights(const HyperArch& arch, std::uint64_t seed) {
  const std::size_t cy = arch.y_channels, cz = arch.z_channels, hid = arch.hidden(), co = arch.out_channels();
  if (cy == 0 || cz == 0 || cy != 2 * cz) throw ConfigError("hyper arch: y channels must be twice the z channels");
  Rng rng(hash3(seed, 0x4a7e, 0));
  HyperWeights w;

  // Each hyper-latent channel summarizes one adjacent pair of subbands.
  w.a1_w = Tensor(Shape{cz, cy, 3, 3});
  w.a1_b.assign(cz, 0.0f);
  for (std::size_t j = 0; j < cz; ++j)
    for (std::size_t half = 0; half < 2; ++half)
      for (int ky = 0; ky < 3; ++ky)
        for (int kx = 0; kx < 3; ++kx) w.a1_w.at(j, 2 * j + half, ky, kx) = 0.5f * kK3[ky][kx] * jitter(rng, 0.05);

  w.a2_w = Tensor(Shape{cz, cz, 3, 3});
  w.a2_b.assign(cz, 0.0f);
  for (std::size_t j = 0; j < cz; ++j)
    for (std::size_t i = 0; i < cz; ++i)
      for (int ky = 0; ky < 3; ++ky)
        for (int kx = 0; kx < 3; ++kx) {
          const float base = i == j ? jitter(rng, 0.05) : static_cast<float>(0.02 * rng.symmetric());
          w.a2_w.at(j, i, ky, kx) = arch.kappa * kK3[ky][kx] * base;
        }

  // s0: bilinear 2x upsampling of z / kappa into 16 signal channels, plus the
  // carrier (channel mean) in the last channel.
  w.s0_w = Tensor(Shape{cz, hid, 4, 4});
  w.s0_b.assign(hid, 0.0f);
  for (std::size_t o = 0; o < cy; ++o)
    for (int ky = 0; ky < 4; ++ky)
      for (int kx = 0; kx < 4; ++kx) w.s0_w.at(o / 2, o, ky, kx) = kBilinear[ky] * kBilinear[kx] / arch.kappa;
  for (std::size_t i = 0; i < cz; ++i)
    for (int ky = 0; ky < 4; ++ky)
      for (int kx = 0; kx < 4; ++kx)
        w.s0_w.at(i, cy, ky, kx) = kBilinear[ky] * kBilinear[kx] / (arch.kappa * static_cast<float>(cz));

  // s1: signal channel c rides on gain_c * carrier; channel cy + c is the bare
  // carrier with identical weights so the last layer can subtract it.
  w.s1_w = Tensor(Shape{hid, co, 4, 4});
  w.s1_b.assign(co, 0.0f);
  for (std::size_t c = 0; c < cy; ++c) {
    const float gain = arch.carrier_gain * jitter(rng, 0.1);
    for (int ky = 0; ky < 4; ++ky)
      for (int kx = 0; kx < 4; ++kx) {
        const float b = kBilinear[ky] * kBilinear[kx];
        w.s1_w.at(c, c, ky, kx) = b;
        w.s1_w.at(cy, c, ky, kx) = gain * b;
        w.s1_w.at(cy, cy + c, ky, kx) = gain * b;
      }
  }

  // s2: outputs [0, cy) are means, [cy, 2cy) log-scales. Carrier taps are the
  // exact negation of the signal taps.
  w.s2_w = Tensor(Shape{co, co, 3, 3});
  w.s2_b.assign(co, 0.0f);
  for (std::size_t c = 0; c < cy; ++c) {
    w.s2_b[cy + c] = arch.sigma_bias + static_cast<float>(0.05 * rng.symmetric());
    for (std::size_t i = 0; i < cy; ++i)
      for (int ky = 0; ky < 3; ++ky)
        for (int kx = 0; kx < 3; ++kx) {
          const float mix = (i == c ? 0.5f : 0.0f) + 0.5f / static_cast<float>(cy);
          const float ks = arch.sigma_gain * mix * kK3[ky][kx] * jitter(rng, 0.05);
          w.s2_w.at(cy + c, i, ky, kx) = ks;
          w.s2_w.at(cy + c, cy + i, ky, kx) = -ks;
          const float km = static_cast<float>(0.02 * rng.symmetric()) * kK3[ky][kx];
          w.s2_w.at(c, i, ky, kx) = km;
          w.s2_w.at(c, cy + i, ky, kx) = -km;
        }
  }
  return w;
}

TensorI32 hyper_analysis(const Tensor& y, float gamma, const HyperWeights& w, const FloatEngine& engine,
                         std::uint32_t layer_base) {
  Tensor u(y.shape());
  auto src = y.data();
  auto dst = u.data();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = std::log1p(std::fabs(gamma * src[i]));
  Tensor h = relu(conv2d(u, w.a1_w, w.a1_b, {2, 1, layer_base + 0}, engine));
  Tensor z = conv2d(h, w.a2_w, w.a2_b, {2, 1, layer_base + 1}, engine);
  TensorI32 out(z.shape());
  auto zd = z.data();
  auto od = out.data();
  for (std::size_t i = 0; i < zd.size(); ++i) {
    double r = quant::round_half_even(static_cast<double>(zd[i]));
    od[i] = static_cast<std::int32_t>(std::isnan(r) ? 0.0 : std::clamp(r, -32768.0, 32767.0));
  }
  return out;
}

Tensor z_to_tensor(const TensorI32& z) {
  Tensor t(z.shape());
  for (std::size_t i = 0; i < z.numel(); ++i) t.data()[i] = static_cast<float>(z.data()[i]);
  return t;
}

HyperActivations hyper_synthesis(const TensorI32& z_hat, const HyperWeights& w, const FloatEngine& engine,
                                 std::uint32_t layer_base) {
  HyperActivations a;
  a.z_hat = z_to_tensor(z_hat);
  const ConvParams up{kSynthesisStride, 1, layer_base + 2};
  a.s1_in = relu(conv_transpose2d(a.z_hat, w.s0_w, w.s0_b, up, engine));
  a.s2_in = relu(conv_transpose2d(a.s1_in, w.s1_w, w.s1_b, {kSynthesisStride, 1, layer_base + 3}, engine));
  a.out = conv2d(a.s2_in, w.s2_w, w.s2_b, {1, 1, layer_base + 4}, engine);
  return a;
}

EntropyParams map_float_params(const Tensor& raw, const entropy::EntropyLut& lut) {
  const Shape& s = raw.shape();
  const std::size_t cy = s.c / 2, plane = s.h * s.w;
  EntropyParams p;
  p.shape = Shape{s.n, cy, s.h, s.w};
  const std::size_t n = p.shape.numel();
  p.mu.resize(n);
  p.mu_shift.resize(n);
  p.sigma_idx.resize(n);
  for (std::size_t b = 0; b < s.n; ++b) {
    for (std::size_t c = 0; c < cy; ++c) {
      auto mu = raw.plane(b, c);
      auto ls = raw.plane(b, cy + c);
      for (std::size_t i = 0; i < plane; ++i) {
        const std::size_t k = (b * cy + c) * plane + i;
        p.mu[k] = mu[i];
        const double r = quant::round_half_even(static_cast<double>(mu[i]));
        p.mu_shift[k] = static_cast<std::int32_t>(std::isnan(r) ? 0.0 : std::clamp(r, -65536.0, 65536.0));
        p.sigma_idx[k] = static_cast<std::uint8_t>(lut.raw_to_index(ls[i]));
      }
    }
  }
  return p;
}

}  // namespace sqv::codec
