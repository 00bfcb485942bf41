#include "sqv/quant/calibrate.hpp"

#include <numeric>

#include "sqv/codec/bitstream.hpp"
#include "sqv/codec/sequence.hpp"
#include "sqv/quant/qconv.hpp"

namespace sqv::quant {

CalibrationData collect_calibration(const codec::Model& model, std::span<const Clip> clips, const FloatEngine& engine,
                                    std::span<const int> qualities) {
  if (clips.empty()) throw ConfigError("calibration needs at least one clip");
  std::vector<int> qs(qualities.begin(), qualities.end());
  if (qs.empty()) {
    qs.resize(codec::kMaxQuality);
    std::iota(qs.begin(), qs.end(), codec::kMinQuality);
  }
  CalibrationData data;
  codec::CodecOptions opt;
  opt.mode = codec::HpMode::float_mode;
  opt.engine = engine;
  for (const Clip& clip : clips) {
    if (clip.empty()) throw ConfigError("calibration clip has no frames");
    for (int q : qs) {
      codec::encode_sequence(model, clip, q, opt, false, [&](codec::SubPath p, const codec::HyperActivations& a) {
        data.activations[static_cast<std::size_t>(p)].push_back(a);
      });
    }
  }
  return data;
}

namespace {

Observer make_observer(ObserverKind kind, Granularity g, double c) {
  switch (kind) {
    case ObserverKind::min_max: return Observer::min_max(g);
    case ObserverKind::moving_average_min_max: return Observer::moving_average_min_max(c, g);
    case ObserverKind::histogram: return Observer::histogram();
  }
  throw ConfigError("unknown observer kind");
}

struct LayerSpec {
  LayerKind kind;
  bool relu;
  const Tensor* weight;
  const std::vector<float>* bias;
  int stride;
};

QuantizedHyperDecoder convert_path(const codec::Model& model, codec::SubPath path,
                                   const std::vector<codec::HyperActivations>& acts, const QConfig& qc) {
  if (acts.empty()) throw ConfigError("no calibration activations recorded for the " +
                                      std::string(codec::subpath_name(path)) + " path");
  const codec::HyperWeights& w = model.weights(path);
  const LayerSpec specs[3] = {
      {LayerKind::deconv, true, &w.s0_w, &w.s0_b, codec::kSynthesisStride},
      {LayerKind::deconv, true, &w.s1_w, &w.s1_b, codec::kSynthesisStride},
      {LayerKind::conv, false, &w.s2_w, &w.s2_b, 1},
  };

  // Observers for the three layer inputs and the final output, fed in
  // recording order.
  std::vector<Observer> act_obs;
  for (int i = 0; i < 4; ++i) act_obs.push_back(make_observer(qc.act_observer, Granularity::per_tensor(), qc.averaging_constant));
  for (const codec::HyperActivations& a : acts) {
    act_obs[0].observe(a.z_hat);
    act_obs[1].observe(a.s1_in);
    act_obs[2].observe(a.s2_in);
    act_obs[3].observe(a.out);
  }
  const Scheme act_scheme = base_scheme(qc.act_scheme);

  QuantizedHyperDecoder d;
  for (int i = 0; i < 3; ++i) {
    const LayerSpec& s = specs[i];
    const Shape& ws = s.weight->shape();
    QuantizedLayer L;
    L.kind = s.kind;
    L.relu = s.relu;
    L.cout = static_cast<std::uint16_t>(s.kind == LayerKind::conv ? ws.n : ws.c);
    L.cin = static_cast<std::uint16_t>(s.kind == LayerKind::conv ? ws.c : ws.n);
    L.k = static_cast<std::uint16_t>(ws.h);
    L.stride = static_cast<std::uint16_t>(s.stride);
    L.act = compute_qparams(act_obs[static_cast<std::size_t>(i)], act_scheme);

    const Granularity g = is_per_channel(qc.weight_scheme)
                              ? Granularity::per_channel_axis(s.kind == LayerKind::conv ? 0 : 1)
                              : Granularity::per_tensor();
    Observer wo = make_observer(qc.weight_observer, g, qc.averaging_constant);
    wo.observe(*s.weight);
    L.weight_qp = compute_qparams(wo, base_scheme(qc.weight_scheme));
    L.weight = quantize(*s.weight, L.weight_qp);
    L.bias = quantize_bias(*s.bias, L.act.scales[0], L.weight_qp);
    d.layers.push_back(std::move(L));
  }
  d.output = compute_qparams(act_obs[3], act_scheme);
  d.lut = model.lut();
  d.rebuild_sigma_map();
  return d;
}

}  // namespace

codec::QuantizedPair convert(const codec::Model& model, const CalibrationData& data, const QConfig& qc) {
  const Validation v = validate_config(qc, true);
  if (!v.ok) throw ConfigError("incompatible quantization config " + qc.label() + ": " + v.reason);
  codec::QuantizedPair q;
  q.config = qc;
  q.intra = convert_path(model, codec::SubPath::intra, data.activations[0], qc);
  q.residual = convert_path(model, codec::SubPath::residual, data.activations[1], qc);
  return q;
}

codec::QuantizedPair calibrate_and_convert(const codec::Model& model, std::span<const Clip> clips, const QConfig& qc,
                                           const FloatEngine& engine, std::span<const int> qualities) {
  const Validation v = validate_config(qc, true);
  if (!v.ok) throw ConfigError("incompatible quantization config " + qc.label() + ": " + v.reason);
  return convert(model, collect_calibration(model, clips, engine, qualities), qc);
}

}  // namespace sqv::quant
