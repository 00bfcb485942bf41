#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace sqv {

// Little-endian serialization helpers shared by every on-disk format.
class ByteWriter {
 public:
  void u8(std::uint8_t v) { buf_.push_back(v); }
  void i8(std::int8_t v) { buf_.push_back(static_cast<std::uint8_t>(v)); }
  void u16(std::uint16_t v);
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
  void f32(float v);
  void bytes(std::span<const std::uint8_t> b) { buf_.insert(buf_.end(), b.begin(), b.end()); }
  void magic(std::string_view m);

  std::size_t size() const { return buf_.size(); }
  const std::vector<std::uint8_t>& data() const& { return buf_; }
  std::vector<std::uint8_t> take() && { return std::move(buf_); }

 private:
  std::vector<std::uint8_t> buf_;
};

// Bounds-checked reader; every overrun raises FormatError naming `context`.
class ByteReader {
 public:
  ByteReader(std::span<const std::uint8_t> data, std::string_view context)
      : data_(data), context_(context) {}

  std::uint8_t u8();
  std::int8_t i8() { return static_cast<std::int8_t>(u8()); }
  std::uint16_t u16();
  std::uint32_t u32();
  std::uint64_t u64();
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  float f32();
  std::span<const std::uint8_t> bytes(std::size_t n);
  void expect_magic(std::string_view m);

  std::size_t offset() const { return pos_; }
  std::size_t remaining() const { return data_.size() - pos_; }
  bool at_end() const { return pos_ == data_.size(); }

 private:
  void need(std::size_t n) const;

  std::span<const std::uint8_t> data_;
  std::string_view context_;
  std::size_t pos_ = 0;
};

// FNV-1a, 64-bit. Used for content-addressed model ids.
std::uint64_t fnv1a64(std::span<const std::uint8_t> data, std::uint64_t seed = 0xcbf29ce484222325ULL);

}  // namespace sqv
