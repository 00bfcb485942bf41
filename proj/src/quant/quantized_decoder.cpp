#include "sqv/quant/quantized_decoder.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sqv/quant/qconv.hpp"

namespace sqv::quant {

namespace {

void write_act(ByteWriter& w, const QParams& qp) {
  w.u8(static_cast<std::uint8_t>(qp.scheme == Scheme::symmetric ? QScheme::per_tensor_symmetric
                                                                 : QScheme::per_tensor_affine));
  w.f32(qp.scales.at(0));
  w.i8(static_cast<std::int8_t>(qp.zero_points.at(0)));
}

QParams read_act(ByteReader& r) {
  const std::uint8_t s = r.u8();
  if (s > 1) throw FormatError("activation qparams must be per-tensor, scheme byte " + std::to_string(s));
  QParams qp;
  qp.scheme = base_scheme(static_cast<QScheme>(s));
  qp.scales = {r.f32()};
  qp.zero_points = {r.i8()};
  return qp;
}

void write_weight(ByteWriter& w, const QParams& qp) {
  QScheme s = qp.scheme == Scheme::symmetric ? QScheme::per_tensor_symmetric : QScheme::per_tensor_affine;
  if (qp.granularity.per_channel) {
    s = qp.scheme == Scheme::symmetric ? QScheme::per_channel_symmetric : QScheme::per_channel_affine;
  }
  w.u8(static_cast<std::uint8_t>(s));
  w.u16(static_cast<std::uint16_t>(qp.scales.size()));
  for (float v : qp.scales) w.f32(v);
  for (std::int32_t z : qp.zero_points) w.i8(static_cast<std::int8_t>(z));
}

QParams read_weight(ByteReader& r, LayerKind kind) {
  const std::uint8_t s = r.u8();
  if (s > 3) throw FormatError("bad weight scheme byte " + std::to_string(s));
  const auto qs = static_cast<QScheme>(s);
  QParams qp;
  qp.scheme = base_scheme(qs);
  if (is_per_channel(qs)) qp.granularity = Granularity::per_channel_axis(kind == LayerKind::conv ? 0 : 1);
  const std::size_t n = r.u16();
  for (std::size_t i = 0; i < n; ++i) qp.scales.push_back(r.f32());
  for (std::size_t i = 0; i < n; ++i) qp.zero_points.push_back(r.i8());
  return qp;
}

void check_qparams(const QParams& qp, const std::string& what) {
  if (qp.scales.empty()) throw FormatError(what + ": no scales");
  for (std::size_t i = 0; i < qp.scales.size(); ++i) {
    if (!(qp.scales[i] > 0.0f) || !std::isfinite(qp.scales[i])) throw FormatError(what + ": non-positive scale");
    if (qp.scheme == Scheme::symmetric && qp.zero_points[i] != 0) {
      throw FormatError(what + ": symmetric scheme with nonzero zero point");
    }
  }
}

}  // namespace

QuantizedHyperDecoder::Run QuantizedHyperDecoder::run(const TensorI32& z_hat) const {
  if (layers.empty()) throw ConfigError("quantized hyper decoder has no layers");
  Run out;
  TensorI8 x = quantize(codec::z_to_tensor(z_hat), layers.front().act);
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const QuantizedLayer& L = layers[i];
    const QParams& next = i + 1 < layers.size() ? layers[i + 1].act : output;
    const QConvOptions opt{L.stride, L.padding(), L.relu};
    out.inputs.push_back(x);
    x = L.kind == LayerKind::conv ? qconv2d(x, L.weight, L.bias, L.act, L.weight_qp, next, opt)
                                  : qconv_transpose2d(x, L.weight, L.bias, L.act, L.weight_qp, next, opt);
  }
  out.out = std::move(x);
  return out;
}

codec::EntropyParams QuantizedHyperDecoder::entropy_params(const TensorI32& z_hat) const {
  const TensorI8 raw = run(z_hat).out;
  const Shape& s = raw.shape();
  const std::size_t cy = s.c / 2, plane = s.h * s.w;
  const float scale = output.scales[0];
  const std::int32_t zp = output.zero_points[0];
  codec::EntropyParams p;
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
        p.mu[k] = dequantize_value(mu[i], scale, zp);
        p.mu_shift[k] = static_cast<std::int32_t>(round_half_even(p.mu[k]));
        p.sigma_idx[k] = sigma_map[static_cast<std::size_t>(ls[i] + 128)];
      }
    }
  }
  return p;
}

void QuantizedHyperDecoder::rebuild_sigma_map() {
  for (int q = -128; q <= 127; ++q) {
    const float raw = dequantize_value(static_cast<std::int8_t>(q), output.scales.at(0), output.zero_points.at(0));
    sigma_map[static_cast<std::size_t>(q + 128)] = static_cast<std::uint8_t>(lut.raw_to_index(raw));
  }
}

void QuantizedHyperDecoder::serialize(ByteWriter& w) const {
  w.magic("SQQ1");
  w.u8(static_cast<std::uint8_t>(layers.size()));
  for (const QuantizedLayer& L : layers) {
    w.u8(static_cast<std::uint8_t>(static_cast<std::uint8_t>(L.kind) | (L.relu ? 0x80 : 0)));
    w.u16(L.cout);
    w.u16(L.cin);
    w.u16(L.k);
    w.u16(L.stride);
    for (std::int8_t q : L.weight.data()) w.i8(q);
    for (std::int32_t b : L.bias) w.i32(b);
    write_act(w, L.act);
    write_weight(w, L.weight_qp);
  }
  write_act(w, output);
  for (std::uint8_t v : sigma_map) w.u8(v);
  lut.serialize(w);
}

std::vector<std::uint8_t> QuantizedHyperDecoder::serialize() const {
  ByteWriter w;
  serialize(w);
  return std::move(w).take();
}

QuantizedHyperDecoder QuantizedHyperDecoder::parse(ByteReader& r) {
  r.expect_magic("SQQ1");
  QuantizedHyperDecoder d;
  const std::size_t n = r.u8();
  for (std::size_t i = 0; i < n; ++i) {
    QuantizedLayer L;
    const std::uint8_t kind = r.u8();
    if ((kind & 0x7F) > 1) throw FormatError("bad layer kind " + std::to_string(kind));
    L.kind = static_cast<LayerKind>(kind & 0x7F);
    L.relu = (kind & 0x80) != 0;
    L.cout = r.u16();
    L.cin = r.u16();
    L.k = r.u16();
    L.stride = r.u16();
    if (L.cout == 0 || L.cin == 0 || L.k == 0 || L.stride == 0 || L.cout > 1024 || L.cin > 1024 || L.k > 15) {
      throw FormatError("implausible quantized layer dims");
    }
    const Shape ws = L.kind == LayerKind::conv ? Shape{L.cout, L.cin, L.k, L.k} : Shape{L.cin, L.cout, L.k, L.k};
    std::vector<std::int8_t> wq(ws.numel());
    for (auto& q : wq) q = r.i8();
    L.weight = TensorI8(ws, std::move(wq));
    L.bias.resize(L.cout);
    for (auto& b : L.bias) b = r.i32();
    L.act = read_act(r);
    L.weight_qp = read_weight(r, L.kind);
    check_qparams(L.act, "layer " + std::to_string(i) + " activation");
    check_qparams(L.weight_qp, "layer " + std::to_string(i) + " weight");
    if (L.weight_qp.slices() != (L.weight_qp.granularity.per_channel ? L.cout : 1u)) {
      throw FormatError("layer " + std::to_string(i) + ": weight qparams count does not match cout");
    }
    if (i > 0 && d.layers.back().cout != L.cin) throw FormatError("quantized layer chain has mismatched channels");
    d.layers.push_back(std::move(L));
  }
  d.output = read_act(r);
  check_qparams(d.output, "output");
  for (auto& v : d.sigma_map) v = r.u8();
  d.lut = entropy::EntropyLut::parse(r);
  for (std::uint8_t v : d.sigma_map) {
    if (v >= d.lut.scales.size()) throw FormatError("sigma map index outside the LUT");
  }
  return d;
}

QuantizedHyperDecoder QuantizedHyperDecoder::parse(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes, "quantized hyper decoder");
  auto d = parse(r);
  if (!r.at_end()) throw FormatError("trailing bytes after quantized hyper decoder");
  return d;
}

}  // namespace sqv::quant
