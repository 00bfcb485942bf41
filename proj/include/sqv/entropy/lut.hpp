#pragma once

#include <cstdint>
#include <vector>

#include "sqv/common/bytes.hpp"
#include "sqv/entropy/freq_table.hpp"

namespace sqv::entropy {

struct LutParams {
  double sigma_min = 0.11;
  double sigma_max = 64.0;
  int scales = 64;
  int window = kDefaultWindow;
  // Factorized prior for the hyper-latent: one row per channel, a Gaussian
  // whose mean / spread are jittered per channel from `seed`.
  int z_channels = 8;
  double z_mean = 8.0;
  double z_sigma = 6.0;
  std::uint64_t seed = 0;
};

struct EntropyLut {
  int window = kDefaultWindow;
  std::vector<float> scales;  // strictly increasing
  std::vector<FreqRow> rows;  // one per scale
  std::vector<FreqRow> z_rows;

  float sigma_min() const { return scales.front(); }
  float sigma_max() const { return scales.back(); }

  // Smallest index whose scale is >= clamp(sigma, sigma_min, sigma_max).
  // NaN maps to the widest row.
  int sigma_to_index(double sigma) const;
  // Float-mode mapping of the hyper-decoder's log-scale output.
  int raw_to_index(float raw_log_sigma) const;

  // "SQL1", scale count u8, W u16, scales f32[], z channel count u8, then
  // every row's u16 frequencies (scale rows first, then z rows).
  void serialize(ByteWriter& w) const;
  static EntropyLut parse(ByteReader& r);

  bool operator==(const EntropyLut&) const = default;
};

EntropyLut build_entropy_luts(const LutParams& params);

}  // namespace sqv::entropy
