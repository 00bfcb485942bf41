#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace sqv::entropy {

inline constexpr int kPrecisionBits = 16;
inline constexpr std::uint32_t kTotal = 1u << kPrecisionBits;
inline constexpr int kDefaultWindow = 64;
inline constexpr int kRawBits = 16;

// Quantized distribution over [-W, W] plus two escape slots. Slot 0 is the
// low tail (value < -W), slots 1..2W+1 are -W..W, slot 2W+2 the high tail.
// Escaped values carry their excess magnitude as a 16-bit raw field.
class FreqRow {
 public:
  FreqRow() = default;

  // Frequencies must number 2W+3, each >= 1, summing to 2^16.
  static FreqRow from_frequencies(std::vector<std::uint16_t> freq);
  // Largest-remainder quantization of `probs` (normalized first).
  static FreqRow from_probabilities(std::span<const double> probs, bool mirrored = false);

  int window() const { return window_; }
  std::size_t size() const { return freq_.size(); }
  std::uint32_t freq(std::size_t slot) const { return freq_[slot]; }
  std::uint32_t cum(std::size_t slot) const { return cum_[slot]; }
  std::span<const std::uint16_t> frequencies() const { return freq_; }

  std::size_t low_escape() const { return 0; }
  std::size_t high_escape() const { return freq_.size() - 1; }
  // Slot of a value; out-of-window values map to an escape slot.
  std::size_t slot_of(int value) const;
  // Slot s with cum(s) <= target < cum(s + 1).
  std::size_t find(std::uint32_t target) const;

  bool operator==(const FreqRow& o) const { return freq_ == o.freq_; }

 private:
  int window_ = 0;
  std::vector<std::uint16_t> freq_;
  std::vector<std::uint32_t> cum_;
};

// Integer quantization of real counts: floor at >= 1, then hand out (or take
// back) the difference to 2^16 by largest (smallest) fractional remainder.
// `mirrored` keeps a symmetric input symmetric by moving slot pairs together.
std::vector<std::uint16_t> quantize_frequencies(std::span<const double> probs, bool mirrored = false);

// erf via the six-coefficient rational polynomial (|error| < 3e-7) and the
// standard normal CDF built on it. Pure +,*,/ so every platform agrees.
double erf_poly(double x);
double normal_cdf(double x);

// Discretized Gaussian N(mean, sigma^2) over unit bins centred on integers.
FreqRow gaussian_row(double sigma, double mean = 0.0, int window = kDefaultWindow);

}  // namespace sqv::entropy
