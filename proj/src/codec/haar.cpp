#include "sqv/codec/haar.hpp"

#include <algorithm>
#include <array>

#include "sqv/conv.hpp"
#include "sqv/quant/qparams.hpp"

namespace sqv::codec {

namespace {

// Rows of the 2x2 orthonormal Haar basis: LL, LH, HL, HH.
constexpr std::array<std::array<float, 4>, 4> kBasis{{
    {0.5f, 0.5f, 0.5f, 0.5f},
    {0.5f, 0.5f, -0.5f, -0.5f},
    {0.5f, -0.5f, 0.5f, -0.5f},
    {0.5f, -0.5f, -0.5f, 0.5f},
}};

const Tensor& level1() {
  static const Tensor w = [] {
    Tensor t(Shape{4, 1, 2, 2});
    for (std::size_t b = 0; b < 4; ++b)
      for (std::size_t k = 0; k < 4; ++k) t.data()[b * 4 + k] = kBasis[b][k];
    return t;
  }();
  return w;
}

const Tensor& level2() {
  static const Tensor w = [] {
    Tensor t(Shape{16, 4, 2, 2});
    for (std::size_t a = 0; a < 4; ++a)
      for (std::size_t b = 0; b < 4; ++b)
        for (std::size_t k = 0; k < 4; ++k) t.at(4 * a + b, a, k / 2, k % 2) = kBasis[b][k];
    return t;
  }();
  return w;
}

constexpr ConvParams kStep{2, 0, 0};

}  // namespace

Tensor haar_analysis(const Tensor& x) {
  const FloatEngine ref = FloatEngine::reference();
  Tensor l1 = conv2d(x, level1(), {}, kStep, ref);
  return conv2d(l1, level2(), {}, kStep, ref);
}

Tensor haar_synthesis(const Tensor& y) {
  const FloatEngine ref = FloatEngine::reference();
  Tensor l1 = conv_transpose2d(y, level2(), {}, kStep, ref);
  return conv_transpose2d(l1, level1(), {}, kStep, ref);
}

Tensor main_analysis(const Frame& frame) {
  check_frame_dims(frame.width, frame.height);
  return haar_analysis(frame_to_tensor(frame));
}

namespace {

Frame synthesize(const Tensor& v, int width, int height, const Frame* base) {
  Tensor x = haar_synthesis(v);
  if (x.shape() != Shape{1, 1, static_cast<std::size_t>(height), static_cast<std::size_t>(width)}) {
    throw ShapeError("latent vs frame", "latent " + v.shape().str() + " does not synthesize a " +
                                            std::to_string(width) + "x" + std::to_string(height) + " frame");
  }
  Frame out(width, height);
  auto d = x.data();
  for (std::size_t i = 0; i < out.samples.size(); ++i) {
    const float b = base ? static_cast<float>(base->samples[i]) : 128.0f;
    const double r = quant::round_half_even(static_cast<double>(b + 128.0f * d[i]));
    out.samples[i] = static_cast<std::uint8_t>(std::clamp(r, 0.0, 255.0));
  }
  return out;
}

}  // namespace

Frame main_synthesis(const Tensor& v, int width, int height) { return synthesize(v, width, height, nullptr); }

Frame main_synthesis(const Tensor& v, const Frame& base) { return synthesize(v, base.width, base.height, &base); }

}  // namespace sqv::codec
