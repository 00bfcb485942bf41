#include "sqv/entropy/range_coder.hpp"

#include <cmath>
#include <string>

#include "sqv/common/error.hpp"

namespace sqv::entropy {

namespace {
constexpr std::uint32_t kTop = 1u << 24;
}

void RangeEncoder::shift_low() {
  if (static_cast<std::uint32_t>(low_) < 0xFF000000u || (low_ >> 32) != 0) {
    const auto carry = static_cast<std::uint8_t>(low_ >> 32);
    std::uint8_t temp = cache_;
    do {
      const auto b = static_cast<std::uint8_t>(temp + carry);
      if (leading_) {
        leading_ = false;  // the interval starts inside [0, 2^32): this byte is 0
      } else {
        out_.push_back(b);
      }
      temp = 0xFF;
    } while (--cache_size_ != 0);
    cache_ = static_cast<std::uint8_t>(low_ >> 24);
  }
  ++cache_size_;
  low_ = (low_ & 0x00FFFFFFu) << 8;
}

void RangeEncoder::encode(std::uint32_t cum, std::uint32_t freq) {
  const std::uint32_t r = range_ >> kPrecisionBits;
  low_ += static_cast<std::uint64_t>(r) * cum;
  range_ = r * freq;
  while (range_ < kTop) {
    range_ <<= 8;
    shift_low();
  }
  ++symbols_;
}

void RangeEncoder::encode_value(int value, const FreqRow& row) {
  const std::size_t slot = row.slot_of(value);
  encode(row.cum(slot), row.freq(slot));
  if (slot == row.low_escape() || slot == row.high_escape()) {
    const long long excess = (value < 0 ? -static_cast<long long>(value) : value) - row.window() - 1;
    if (excess > 0xFFFF) {
      throw RangeError("symbol " + std::to_string(value) + " exceeds the escape range of window " +
                       std::to_string(row.window()));
    }
    encode(static_cast<std::uint32_t>(excess), 1);
  }
}

std::vector<std::uint8_t> RangeEncoder::finish() {
  if (symbols_ == 0) return {};
  for (int i = 0; i < 5; ++i) shift_low();
  return std::move(out_);
}

RangeDecoder::RangeDecoder(std::span<const std::uint8_t> bytes, PastEnd past_end)
    : in_(bytes), past_end_(past_end) {
  for (int i = 0; i < 4; ++i) code_ = (code_ << 8) | next();
}

std::uint8_t RangeDecoder::next() {
  if (pos_ < in_.size()) return in_[pos_++];
  if (past_end_ == PastEnd::error) throw FormatError("truncated range-coded payload");
  ++overrun_;
  return 0;
}

void RangeDecoder::normalize() {
  while (range_ < kTop) {
    code_ = (code_ << 8) | next();
    range_ <<= 8;
  }
}

std::size_t RangeDecoder::decode_slot(const FreqRow& row) {
  const std::uint32_t r = range_ >> kPrecisionBits;
  std::uint32_t v = code_ / r;
  if (v >= kTotal) v = kTotal - 1;  // only reachable on a desynchronized stream
  const std::size_t slot = row.find(v);
  code_ -= r * row.cum(slot);
  range_ = r * row.freq(slot);
  normalize();
  return slot;
}

std::uint32_t RangeDecoder::decode_raw16() {
  const std::uint32_t r = range_ >> kPrecisionBits;
  std::uint32_t v = code_ / r;
  if (v >= kTotal) v = kTotal - 1;
  code_ -= r * v;
  range_ = r;
  normalize();
  return v;
}

int RangeDecoder::decode_value(const FreqRow& row) {
  const std::size_t slot = decode_slot(row);
  if (slot == row.low_escape()) return -(row.window() + 1 + static_cast<int>(decode_raw16()));
  if (slot == row.high_escape()) return row.window() + 1 + static_cast<int>(decode_raw16());
  return static_cast<int>(slot) - row.window() - 1;
}

std::vector<std::uint8_t> rc_encode(std::span<const int> symbols, std::span<const FreqRow* const> rows) {
  if (symbols.size() != rows.size()) throw ConfigError("rc_encode: one row per symbol required");
  RangeEncoder enc;
  for (std::size_t i = 0; i < symbols.size(); ++i) enc.encode_value(symbols[i], *rows[i]);
  return enc.finish();
}

std::vector<int> rc_decode(std::span<const std::uint8_t> bytes, std::span<const FreqRow* const> rows,
                           PastEnd past_end) {
  std::vector<int> out;
  if (rows.empty()) return out;
  RangeDecoder dec(bytes, past_end);
  out.reserve(rows.size());
  for (const FreqRow* row : rows) out.push_back(dec.decode_value(*row));
  return out;
}

double ideal_bits(std::span<const int> symbols, std::span<const FreqRow* const> rows) {
  double bits = 0.0;
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    const FreqRow& row = *rows[i];
    const std::size_t slot = row.slot_of(symbols[i]);
    bits += kPrecisionBits - std::log2(static_cast<double>(row.freq(slot)));
    if (slot == row.low_escape() || slot == row.high_escape()) bits += kRawBits;
  }
  return bits;
}

}  // namespace sqv::entropy
