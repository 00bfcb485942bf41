#include "sqv/codec/bitstream.hpp"

#include <string>

#include "sqv/common/bytes.hpp"
#include "sqv/common/error.hpp"

namespace sqv::codec {

float quality_gain(int quality) {
  if (quality < kMinQuality || quality > kMaxQuality) {
    throw ConfigError("quality must be in 1..9, got " + std::to_string(quality));
  }
  return kQualityGains[static_cast<std::size_t>(quality - 1)];
}

std::vector<std::uint8_t> Bitstream::serialize() const {
  if (frames.size() > 0xFFFF) throw RangeError("too many frames for one bitstream");
  ByteWriter w;
  w.magic("SQV1");
  w.u8(version);
  w.u8(flags);
  w.u16(width);
  w.u16(height);
  w.u16(static_cast<std::uint16_t>(frames.size()));
  w.u8(quality);
  w.u64(model_id);
  for (const FrameRecord& f : frames) {
    w.u8(static_cast<std::uint8_t>(f.type));
    w.u32(static_cast<std::uint32_t>(f.z.size()));
    w.bytes(f.z);
    w.u32(static_cast<std::uint32_t>(f.y.size()));
    w.bytes(f.y);
  }
  return std::move(w).take();
}

std::size_t Bitstream::byte_size() const {
  std::size_t n = kHeaderBytes;
  for (const FrameRecord& f : frames) n += kFrameOverheadBytes + f.z.size() + f.y.size();
  return n;
}

Bitstream Bitstream::parse(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes, "bitstream");
  r.expect_magic("SQV1");
  Bitstream b;
  b.version = r.u8();
  if (b.version != kVersion) throw FormatError("unsupported bitstream version " + std::to_string(b.version));
  b.flags = r.u8();
  if ((b.flags & ~(kFlagQuantized | kFlagMeanOffset)) != 0) throw FormatError("unknown bitstream flags");
  b.width = r.u16();
  b.height = r.u16();
  const std::size_t count = r.u16();
  b.quality = r.u8();
  if (b.quality < kMinQuality || b.quality > kMaxQuality) throw FormatError("bitstream quality out of range");
  b.model_id = r.u64();
  for (std::size_t i = 0; i < count; ++i) {
    FrameRecord f;
    const std::uint8_t type = r.u8();
    if (type > 1) throw FormatError("bad frame type " + std::to_string(type));
    if ((i == 0) != (type == 0)) throw FormatError("frame 0 must be the only intra frame");
    f.type = static_cast<FrameType>(type);
    const std::uint32_t zl = r.u32();
    auto z = r.bytes(zl);
    f.z.assign(z.begin(), z.end());
    const std::uint32_t yl = r.u32();
    auto y = r.bytes(yl);
    f.y.assign(y.begin(), y.end());
    b.frames.push_back(std::move(f));
  }
  if (!r.at_end()) throw FormatError("trailing bytes after last frame");
  return b;
}

}  // namespace sqv::codec
