#include "sqv/quant/qparams.hpp"

#include <algorithm>
#include <cmath>

namespace sqv::quant {

double round_half_even(double v) {
  // nearbyint honours the current rounding mode; the library never changes it
  // from the default round-to-nearest-even.
  return std::nearbyint(v);
}

std::int8_t quantize_value(float x, float scale, std::int32_t zero_point, int qmin, int qmax) {
  double q = round_half_even(static_cast<double>(x) / static_cast<double>(scale));
  if (std::isnan(q)) q = 0.0;
  q = std::clamp(q + zero_point, static_cast<double>(qmin), static_cast<double>(qmax));
  return static_cast<std::int8_t>(q);
}

float dequantize_value(std::int8_t q, float scale, std::int32_t zero_point) {
  return static_cast<float>(static_cast<std::int32_t>(q) - zero_point) * scale;
}

std::size_t slice_of(const Shape& shape, const Granularity& g, std::size_t i) {
  if (!g.per_channel) return 0;
  std::size_t plane = shape.h * shape.w;
  if (g.axis == 0) return i / (shape.c * plane);
  return (i / plane) % shape.c;
}

namespace {

void check_slices(const Shape& shape, const QParams& qp) {
  if (qp.scales.empty() || qp.scales.size() != qp.zero_points.size()) {
    throw ConfigError("qparams: scales and zero points must be non-empty and equal in count");
  }
  std::size_t want = 1;
  if (qp.granularity.per_channel) {
    if (qp.granularity.axis == 0) {
      want = shape.n;
    } else if (qp.granularity.axis == 1) {
      want = shape.c;
    } else {
      throw ConfigError("qparams: per-channel axis must be 0 or 1");
    }
  }
  if (qp.scales.size() != want) {
    throw ShapeError(qp.granularity.axis == 0 ? "qparams.slices vs tensor.n" : "qparams.slices vs tensor.c",
                     std::to_string(qp.scales.size()) + " slices for tensor " + shape.str());
  }
}

}  // namespace

TensorI8 quantize(const Tensor& t, const QParams& qp) {
  check_slices(t.shape(), qp);
  TensorI8 out(t.shape());
  auto src = t.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < src.size(); ++i) {
    std::size_t s = slice_of(t.shape(), qp.granularity, i);
    dst[i] = quantize_value(src[i], qp.scales[s], qp.zero_points[s], qp.qmin(), qp.qmax());
  }
  return out;
}

Tensor dequantize(const TensorI8& t, const QParams& qp) {
  check_slices(t.shape(), qp);
  Tensor out(t.shape());
  auto src = t.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < src.size(); ++i) {
    std::size_t s = slice_of(t.shape(), qp.granularity, i);
    dst[i] = dequantize_value(src[i], qp.scales[s], qp.zero_points[s]);
  }
  return out;
}

}  // namespace sqv::quant
