#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sqv/entropy/freq_table.hpp"

namespace sqv::entropy {

// Carry-propagating range coder: 64-bit low, 32-bit range, byte-wise
// renormalization below 2^24, 16-bit frequency totals. The always-zero
// leading byte of the classic carry scheme is not emitted.
class RangeEncoder {
 public:
  void encode(std::uint32_t cum, std::uint32_t freq);
  // Window values directly, out-of-window values as escape + 16-bit raw excess.
  void encode_value(int value, const FreqRow& row);
  std::vector<std::uint8_t> finish();
  std::size_t symbols() const { return symbols_; }

 private:
  void shift_low();

  std::uint64_t low_ = 0;
  std::uint32_t range_ = 0xFFFFFFFFu;
  std::uint8_t cache_ = 0;
  std::uint64_t cache_size_ = 1;
  bool leading_ = true;
  std::size_t symbols_ = 0;
  std::vector<std::uint8_t> out_;
};

enum class PastEnd : std::uint8_t {
  error,      // reading beyond the payload raises FormatError
  zero_fill,  // missing bytes read as zero (a desynchronized decoder never notices)
};

class RangeDecoder {
 public:
  explicit RangeDecoder(std::span<const std::uint8_t> bytes, PastEnd past_end = PastEnd::error);

  std::size_t decode_slot(const FreqRow& row);
  std::uint32_t decode_raw16();
  int decode_value(const FreqRow& row);
  // Bytes consumed beyond the payload (zero_fill only).
  std::size_t overrun() const { return overrun_; }

 private:
  std::uint8_t next();
  void normalize();

  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
  PastEnd past_end_;
  std::size_t overrun_ = 0;
  std::uint32_t code_ = 0;
  std::uint32_t range_ = 0xFFFFFFFFu;
};

// Convenience wrappers: one row per symbol.
std::vector<std::uint8_t> rc_encode(std::span<const int> symbols, std::span<const FreqRow* const> rows);
std::vector<int> rc_decode(std::span<const std::uint8_t> bytes, std::span<const FreqRow* const> rows,
                           PastEnd past_end = PastEnd::error);

// Ideal code length in bits of `symbols` under `rows`, raw escape bits included.
double ideal_bits(std::span<const int> symbols, std::span<const FreqRow* const> rows);

}  // namespace sqv::entropy
