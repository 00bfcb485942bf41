#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "sqv/codec/bitstream.hpp"
#include "sqv/codec/frame.hpp"
#include "sqv/codec/hyper.hpp"
#include "sqv/codec/model.hpp"
#include "sqv/float_engine.hpp"

namespace sqv::codec {

enum class HpMode : std::uint8_t { float_mode, quantized };
const char* hp_mode_name(HpMode m);
HpMode parse_hp_mode(std::string_view s);  // "float" | "quant"

struct CodecOptions {
  HpMode mode = HpMode::float_mode;
  FloatEngine engine = FloatEngine::reference();
  bool mean_offset = false;
};

// Every traced signal of one coded frame.
struct FrameSignals {
  FrameType type = FrameType::intra;
  TensorI32 z_hat;
  EntropyParams params;
  std::vector<std::int32_t> y_hat;  // decoded integer latents
  Frame recon;
};

// Hyper-prior decoding of one frame's z_hat.
EntropyParams hyper_decode(const Model& model, SubPath path, const TensorI32& z_hat, HpMode mode,
                           const FloatEngine& engine);

// Identity: the previous reconstruction is the prediction.
inline const Frame& predictor(const Frame& prev_recon) { return prev_recon; }

struct EncodeResult {
  Bitstream bitstream;
  std::vector<Frame> recon;            // the encoder's own closed-loop reconstructions
  std::vector<FrameSignals> signals;   // filled only when requested
};

// Called with each frame's float hyper-synthesis activations (float mode only).
using HyperTap = std::function<void(SubPath, const HyperActivations&)>;

EncodeResult encode_sequence(const Model& model, std::span<const Frame> frames, int quality,
                             const CodecOptions& opt, bool keep_signals = false, const HyperTap& tap = {});

struct DecodeResult {
  std::vector<Frame> frames;
  std::vector<FrameSignals> signals;
};

// The hyper-prior mode comes from the bitstream flags. Throws
// ModelMismatchError if the model id differs.
DecodeResult decode_sequence(const Model& model, const Bitstream& bs, const FloatEngine& engine,
                             bool keep_signals = false);

}  // namespace sqv::codec
