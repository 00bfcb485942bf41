#include "sqv/codec/model.hpp"

#include <fstream>
#include <iterator>

#include "sqv/common/bytes.hpp"
#include "sqv/common/rng.hpp"

namespace sqv::codec {

const char* subpath_name(SubPath p) { return p == SubPath::intra ? "intra" : "residual"; }

namespace {

entropy::LutParams lut_params(const HyperArch& arch, std::uint64_t seed) {
  entropy::LutParams p;
  p.z_channels = arch.z_channels;
  p.seed = seed;
  return p;
}

}  // namespace

Model Model::create(std::uint64_t seed, const HyperArch& arch) {
  Model m;
  m.arch_ = arch;
  m.seed_ = seed;
  m.lut_ = entropy::build_entropy_luts(lut_params(arch, seed));
  m.finalize();
  return m;
}

void Model::finalize() {
  intra_ = make_hyper_weights(arch_, hash3(seed_, 1, 0));
  residual_ = make_hyper_weights(arch_, hash3(seed_, 2, 0));
  const auto bytes = serialize();
  id_ = fnv1a64(bytes);
}

const QuantizedPair& Model::quant() const {
  if (!quant_) throw ConfigError("model has no quantized hyper decoder; run calibrate first");
  return *quant_;
}

const quant::QuantizedHyperDecoder& Model::quantized_decoder(SubPath p) const {
  return p == SubPath::intra ? quant().intra : quant().residual;
}

void Model::set_quantized(QuantizedPair q) {
  quant_ = std::move(q);
  id_ = fnv1a64(serialize());
}

void Model::clear_quantized() {
  quant_.reset();
  id_ = fnv1a64(serialize());
}

std::vector<std::uint8_t> Model::serialize() const {
  ByteWriter w;
  w.magic("SQM1");
  w.u8(kVersion);
  w.u8(2);  // Haar levels
  w.u8(arch_.y_channels);
  w.u8(arch_.z_channels);
  w.f32(arch_.kappa);
  w.f32(arch_.carrier_gain);
  w.f32(arch_.sigma_gain);
  w.f32(arch_.sigma_bias);
  w.u64(seed_);
  lut_.serialize(w);
  w.u8(quant_ ? 1 : 0);
  if (quant_) {
    const quant::QConfig& c = quant_->config;
    w.u8(static_cast<std::uint8_t>(c.config_id < 0 ? 0xFF : c.config_id));
    w.u8(static_cast<std::uint8_t>(c.act_observer));
    w.u8(static_cast<std::uint8_t>(c.act_scheme));
    w.u8(static_cast<std::uint8_t>(c.weight_observer));
    w.u8(static_cast<std::uint8_t>(c.weight_scheme));
    w.f32(static_cast<float>(c.averaging_constant));
    quant_->intra.serialize(w);
    quant_->residual.serialize(w);
  }
  return std::move(w).take();
}

Model Model::parse(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes, "model file");
  r.expect_magic("SQM1");
  const std::uint8_t version = r.u8();
  if (version != kVersion) throw FormatError("unsupported model version " + std::to_string(version));
  const std::uint8_t levels = r.u8();
  if (levels != 2) throw FormatError("unsupported Haar level count " + std::to_string(levels));
  Model m;
  m.arch_.y_channels = r.u8();
  m.arch_.z_channels = r.u8();
  m.arch_.kappa = r.f32();
  m.arch_.carrier_gain = r.f32();
  m.arch_.sigma_gain = r.f32();
  m.arch_.sigma_bias = r.f32();
  if (m.arch_.y_channels != 16 || m.arch_.z_channels != 8) throw FormatError("unsupported hyper channel counts");
  m.seed_ = r.u64();
  m.lut_ = entropy::EntropyLut::parse(r);
  if (m.lut_.z_rows.size() != m.arch_.z_channels) throw FormatError("LUT z rows do not match the z channels");
  const std::uint8_t has_quant = r.u8();
  if (has_quant > 1) throw FormatError("bad quantized flag");
  if (has_quant) {
    QuantizedPair q;
    const std::uint8_t id = r.u8();
    q.config.config_id = id == 0xFF ? -1 : id;
    const std::uint8_t ao = r.u8(), as = r.u8(), wo = r.u8(), ws = r.u8();
    if (ao > 2 || wo > 2 || as > 3 || ws > 3) throw FormatError("bad quantization config descriptor");
    q.config.act_observer = static_cast<quant::ObserverKind>(ao);
    q.config.act_scheme = static_cast<quant::QScheme>(as);
    q.config.weight_observer = static_cast<quant::ObserverKind>(wo);
    q.config.weight_scheme = static_cast<quant::QScheme>(ws);
    q.config.averaging_constant = r.f32();
    q.intra = quant::QuantizedHyperDecoder::parse(r);
    q.residual = quant::QuantizedHyperDecoder::parse(r);
    for (const auto* d : {&q.intra, &q.residual}) {
      if (d->layers.size() != 3 || d->layers[0].cin != m.arch_.z_channels ||
          d->layers[2].cout != m.arch_.out_channels()) {
        throw FormatError("quantized hyper decoder does not match the model architecture");
      }
    }
    m.quant_ = std::move(q);
  }
  if (!r.at_end()) throw FormatError("trailing bytes in model file");
  m.intra_ = make_hyper_weights(m.arch_, hash3(m.seed_, 1, 0));
  m.residual_ = make_hyper_weights(m.arch_, hash3(m.seed_, 2, 0));
  m.id_ = fnv1a64(bytes);
  return m;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError("write failed for " + path.string());
}

void Model::save(const std::filesystem::path& path) const { write_file(path, serialize()); }

Model Model::load(const std::filesystem::path& path) { return parse(read_file(path)); }

}  // namespace sqv::codec
