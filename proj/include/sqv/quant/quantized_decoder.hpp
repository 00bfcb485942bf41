#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "sqv/codec/hyper.hpp"
#include "sqv/common/bytes.hpp"
#include "sqv/entropy/lut.hpp"
#include "sqv/quant/config.hpp"
#include "sqv/quant/qparams.hpp"
#include "sqv/tensor.hpp"

namespace sqv::quant {

enum class LayerKind : std::uint8_t { conv = 0, deconv = 1 };

struct QuantizedLayer {
  LayerKind kind = LayerKind::conv;
  bool relu = false;
  std::uint16_t cout = 0, cin = 0, k = 0, stride = 1;
  TensorI8 weight;  // conv [cout, cin, k, k], deconv [cin, cout, k, k]
  std::vector<std::int32_t> bias;
  QParams act;  // of this layer's input
  QParams weight_qp;

  // Padding is implied: (k - 1) / 2 for conv, (k - stride) / 2 for deconv.
  int padding() const { return kind == LayerKind::conv ? (k - 1) / 2 : (k - stride) / 2; }
  bool operator==(const QuantizedLayer&) const = default;
};

// Integer-only hyper-prior decoder. Runs qconv kernels from an int8 z_hat to
// the int8 (mu, log-scale) map; sigma indices come from a 256-entry table.
class QuantizedHyperDecoder {
 public:
  std::vector<QuantizedLayer> layers;
  QParams output;                           // of the last layer's output
  std::array<std::uint8_t, 256> sigma_map{};  // indexed by q + 128
  entropy::EntropyLut lut;

  // Quantized activations of every layer input plus the output.
  struct Run {
    std::vector<TensorI8> inputs;
    TensorI8 out;
  };
  Run run(const TensorI32& z_hat) const;

  // mu = (q - zp) * scale (one rounding), sigma index = sigma_map[q + 128].
  codec::EntropyParams entropy_params(const TensorI32& z_hat) const;

  void rebuild_sigma_map();

  // "SQQ1" layout; see README.
  void serialize(ByteWriter& w) const;
  std::vector<std::uint8_t> serialize() const;
  static QuantizedHyperDecoder parse(ByteReader& r);
  static QuantizedHyperDecoder parse(std::span<const std::uint8_t> bytes);

  bool operator==(const QuantizedHyperDecoder&) const = default;
};

}  // namespace sqv::quant
