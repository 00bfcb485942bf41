#include "sqv/codec/sequence.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "sqv/codec/haar.hpp"
#include "sqv/entropy/range_coder.hpp"
#include "sqv/quant/qparams.hpp"

namespace sqv::codec {

const char* hp_mode_name(HpMode m) { return m == HpMode::float_mode ? "float" : "quant"; }

HpMode parse_hp_mode(std::string_view s) {
  if (s == "float") return HpMode::float_mode;
  if (s == "quant" || s == "quantized") return HpMode::quantized;
  throw ConfigError("mode must be float or quant, got '" + std::string(s) + "'");
}

EntropyParams hyper_decode(const Model& model, SubPath path, const TensorI32& z_hat, HpMode mode,
                           const FloatEngine& engine) {
  if (mode == HpMode::quantized) return model.quantized_decoder(path).entropy_params(z_hat);
  HyperActivations a = hyper_synthesis(z_hat, model.weights(path), engine, model.layer_base(path));
  return map_float_params(a.out, model.lut());
}

namespace {

constexpr double kLatentLimit = 60000.0;

std::int32_t round_latent(double v) {
  const double r = quant::round_half_even(v);
  if (std::isnan(r)) return 0;
  return static_cast<std::int32_t>(std::clamp(r, -kLatentLimit, kLatentLimit));
}

std::vector<std::uint8_t> encode_z(const TensorI32& z, const entropy::EntropyLut& lut) {
  entropy::RangeEncoder enc;
  const std::size_t plane = z.shape().h * z.shape().w;
  for (std::size_t i = 0; i < z.numel(); ++i) enc.encode_value(z.data()[i], lut.z_rows[(i / plane) % z.shape().c]);
  return enc.finish();
}

TensorI32 decode_z(std::span<const std::uint8_t> bytes, const Shape& shape, const entropy::EntropyLut& lut) {
  TensorI32 z(shape);
  entropy::RangeDecoder dec(bytes, entropy::PastEnd::error);
  const std::size_t plane = shape.h * shape.w;
  for (std::size_t i = 0; i < z.numel(); ++i) z.data()[i] = dec.decode_value(lut.z_rows[(i / plane) % shape.c]);
  return z;
}

// Latents handed to synthesis: y_hat / gamma, or (s + mu) / gamma in
// mean-offset mode.
Tensor dequantized_latent(const std::vector<std::int32_t>& yq, const EntropyParams& p, float gamma, bool mean_offset) {
  Tensor v(p.shape);
  auto d = v.data();
  for (std::size_t i = 0; i < yq.size(); ++i) {
    const float s = static_cast<float>(yq[i]);
    d[i] = (mean_offset ? s + p.mu[i] : s) / gamma;
  }
  return v;
}

Shape z_shape(int width, int height, std::size_t zc) {
  return Shape{1, zc, static_cast<std::size_t>(height / 16), static_cast<std::size_t>(width / 16)};
}

Shape y_shape(int width, int height) {
  return Shape{1, kLatentChannels, static_cast<std::size_t>(height / kLatentStride),
               static_cast<std::size_t>(width / kLatentStride)};
}

}  // namespace

EncodeResult encode_sequence(const Model& model, std::span<const Frame> frames, int quality, const CodecOptions& opt,
                             bool keep_signals, const HyperTap& tap) {
  if (frames.empty()) throw ConfigError("encode_sequence: no frames");
  const float gamma = quality_gain(quality);
  const int width = frames[0].width, height = frames[0].height;
  check_frame_dims(width, height);
  if (opt.mode == HpMode::quantized) (void)model.quant();

  EncodeResult res;
  Bitstream& bs = res.bitstream;
  bs.flags = static_cast<std::uint8_t>((opt.mode == HpMode::quantized ? kFlagQuantized : 0) |
                                       (opt.mean_offset ? kFlagMeanOffset : 0));
  bs.width = static_cast<std::uint16_t>(width);
  bs.height = static_cast<std::uint16_t>(height);
  bs.quality = static_cast<std::uint8_t>(quality);
  bs.model_id = model.model_id();
  const entropy::EntropyLut& lut = model.lut();

  for (std::size_t t = 0; t < frames.size(); ++t) {
    const Frame& x = frames[t];
    if (x.width != width || x.height != height) throw ShapeError("frame dims", "all frames must share dimensions");
    const bool intra = t == 0;
    const SubPath path = intra ? SubPath::intra : SubPath::residual;

    Tensor y;
    if (intra) {
      y = main_analysis(x);
    } else {
      const Frame& pred = predictor(res.recon.back());
      Tensor r(Shape{1, 1, static_cast<std::size_t>(height), static_cast<std::size_t>(width)});
      for (std::size_t i = 0; i < x.samples.size(); ++i) {
        r.data()[i] = (static_cast<float>(x.samples[i]) - static_cast<float>(pred.samples[i])) / 128.0f;
      }
      y = haar_analysis(r);
    }

    const TensorI32 z = hyper_analysis(y, gamma, model.weights(path), opt.engine, model.layer_base(path));
    EntropyParams p;
    if (opt.mode == HpMode::float_mode) {
      HyperActivations a = hyper_synthesis(z, model.weights(path), opt.engine, model.layer_base(path));
      if (tap) tap(path, a);
      p = map_float_params(a.out, lut);
    } else {
      p = hyper_decode(model, path, z, opt.mode, opt.engine);
    }

    entropy::RangeEncoder enc;
    std::vector<std::int32_t> yq(y.numel());
    for (std::size_t i = 0; i < yq.size(); ++i) {
      const float gy = gamma * y.data()[i];
      std::int32_t sym;
      if (opt.mean_offset) {
        yq[i] = round_latent(static_cast<double>(gy - p.mu[i]));
        sym = yq[i];
      } else {
        yq[i] = round_latent(gy);
        sym = yq[i] - p.mu_shift[i];
      }
      enc.encode_value(sym, lut.rows[p.sigma_idx[i]]);
    }

    FrameRecord rec;
    rec.type = intra ? FrameType::intra : FrameType::inter;
    rec.z = encode_z(z, lut);
    rec.y = enc.finish();
    bs.frames.push_back(std::move(rec));

    const Tensor v = dequantized_latent(yq, p, gamma, opt.mean_offset);
    Frame recon = intra ? main_synthesis(v, width, height) : main_synthesis(v, predictor(res.recon.back()));
    if (keep_signals) res.signals.push_back({rec.type, z, p, yq, recon});
    res.recon.push_back(std::move(recon));
  }
  return res;
}

DecodeResult decode_sequence(const Model& model, const Bitstream& bs, const FloatEngine& engine, bool keep_signals) {
  if (bs.model_id != model.model_id()) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "model_id mismatch: bitstream %016llx, model %016llx",
                  static_cast<unsigned long long>(bs.model_id), static_cast<unsigned long long>(model.model_id()));
    throw ModelMismatchError(buf);
  }
  check_frame_dims(bs.width, bs.height);
  const HpMode mode = bs.quantized() ? HpMode::quantized : HpMode::float_mode;
  if (mode == HpMode::quantized) (void)model.quant();
  const float gamma = quality_gain(bs.quality);
  const int width = bs.width, height = bs.height;
  const entropy::EntropyLut& lut = model.lut();
  const Shape zs = z_shape(width, height, model.arch().z_channels);

  DecodeResult res;
  for (std::size_t t = 0; t < bs.frames.size(); ++t) {
    const FrameRecord& rec = bs.frames[t];
    const bool intra = rec.type == FrameType::intra;
    if (intra != (t == 0)) throw FormatError("frame 0 must be the only intra frame");
    const SubPath path = intra ? SubPath::intra : SubPath::residual;

    const TensorI32 z = decode_z(rec.z, zs, lut);
    const EntropyParams p = hyper_decode(model, path, z, mode, engine);
    if (p.shape != y_shape(width, height)) throw ShapeError("hyper output vs latent", p.shape.str());

    // A decoder whose tables drifted from the encoder's may read past the
    // payload; that is silent desync, not a format error.
    entropy::RangeDecoder dec(rec.y, entropy::PastEnd::zero_fill);
    std::vector<std::int32_t> yq(p.shape.numel());
    for (std::size_t i = 0; i < yq.size(); ++i) {
      const int sym = dec.decode_value(lut.rows[p.sigma_idx[i]]);
      yq[i] = bs.mean_offset() ? sym : sym + p.mu_shift[i];
    }

    const Tensor v = dequantized_latent(yq, p, gamma, bs.mean_offset());
    Frame recon = intra ? main_synthesis(v, width, height) : main_synthesis(v, predictor(res.frames.back()));
    if (keep_signals) res.signals.push_back({rec.type, z, p, yq, recon});
    res.frames.push_back(std::move(recon));
  }
  return res;
}

}  // namespace sqv::codec
