#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "sqv/codec/hyper.hpp"
#include "sqv/entropy/lut.hpp"
#include "sqv/quant/config.hpp"
#include "sqv/quant/quantized_decoder.hpp"

namespace sqv::codec {

enum class SubPath : std::uint8_t { intra = 0, residual = 1 };
const char* subpath_name(SubPath p);

struct QuantizedPair {
  quant::QConfig config;
  quant::QuantizedHyperDecoder intra, residual;
  bool operator==(const QuantizedPair& o) const {
    return config.config_id == o.config.config_id && intra == o.intra && residual == o.residual;
  }
};

// Weights are regenerated from `seed`; only the seed, the architecture, the
// entropy tables and the optional quantized decoders are stored.
class Model {
 public:
  static constexpr std::uint8_t kVersion = 1;

  static Model create(std::uint64_t seed, const HyperArch& arch = {});

  const HyperArch& arch() const { return arch_; }
  std::uint64_t seed() const { return seed_; }
  const entropy::EntropyLut& lut() const { return lut_; }
  const HyperWeights& weights(SubPath p) const { return p == SubPath::intra ? intra_ : residual_; }
  std::uint32_t layer_base(SubPath p) const { return p == SubPath::intra ? kIntraLayerBase : kResidualLayerBase; }

  bool quantized() const { return quant_.has_value(); }
  const QuantizedPair& quant() const;
  const quant::QuantizedHyperDecoder& quantized_decoder(SubPath p) const;
  void set_quantized(QuantizedPair q);
  void clear_quantized();

  std::uint64_t model_id() const { return id_; }

  // "SQM1", version u8, arch, seed u64, "SQL1" section, quantized flag u8,
  // then (if set) the config descriptor and the intra and residual "SQQ1" blobs.
  std::vector<std::uint8_t> serialize() const;
  static Model parse(std::span<const std::uint8_t> bytes);
  void save(const std::filesystem::path& path) const;
  static Model load(const std::filesystem::path& path);

 private:
  void finalize();

  HyperArch arch_;
  std::uint64_t seed_ = 0;
  entropy::EntropyLut lut_;
  HyperWeights intra_, residual_;
  std::optional<QuantizedPair> quant_;
  std::uint64_t id_ = 0;
};

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace sqv::codec
