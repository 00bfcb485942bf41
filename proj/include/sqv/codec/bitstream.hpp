#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace sqv::codec {

inline constexpr std::array<float, 9> kQualityGains = {0.25f, 0.5f, 1.0f, 2.0f, 4.0f, 8.0f, 16.0f, 32.0f, 64.0f};
inline constexpr int kMinQuality = 1;
inline constexpr int kMaxQuality = 9;

// Throws ConfigError outside 1..9.
float quality_gain(int quality);

enum class FrameType : std::uint8_t { intra = 0, inter = 1 };

struct FrameRecord {
  FrameType type = FrameType::intra;
  std::vector<std::uint8_t> z;
  std::vector<std::uint8_t> y;
  bool operator==(const FrameRecord&) const = default;
};

inline constexpr std::uint8_t kFlagQuantized = 0x01;
inline constexpr std::uint8_t kFlagMeanOffset = 0x02;

struct Bitstream {
  static constexpr std::uint8_t kVersion = 1;

  std::uint8_t version = kVersion;
  std::uint8_t flags = 0;
  std::uint16_t width = 0, height = 0;
  std::uint8_t quality = 1;
  std::uint64_t model_id = 0;
  std::vector<FrameRecord> frames;

  bool quantized() const { return (flags & kFlagQuantized) != 0; }
  bool mean_offset() const { return (flags & kFlagMeanOffset) != 0; }

  // "SQV1", version u8, flags u8, width u16, height u16, frame count u16,
  // quality u8, model id u64; per frame: type u8, z_len u32, z, y_len u32, y.
  std::vector<std::uint8_t> serialize() const;
  static Bitstream parse(std::span<const std::uint8_t> bytes);
  std::size_t byte_size() const;

  bool operator==(const Bitstream&) const = default;
};

inline constexpr std::size_t kHeaderBytes = 4 + 1 + 1 + 2 + 2 + 2 + 1 + 8;
inline constexpr std::size_t kFrameOverheadBytes = 1 + 4 + 4;

}  // namespace sqv::codec
