#include "sqv/entropy/lut.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sqv/common/error.hpp"
#include "sqv/common/rng.hpp"

namespace sqv::entropy {

int EntropyLut::sigma_to_index(double sigma) const {
  const int last = static_cast<int>(scales.size()) - 1;
  if (std::isnan(sigma)) return last;
  if (sigma <= scales.front()) return 0;
  if (sigma >= scales.back()) return last;
  auto it = std::lower_bound(scales.begin(), scales.end(), sigma,
                             [](float s, double v) { return static_cast<double>(s) < v; });
  return static_cast<int>(it - scales.begin());
}

int EntropyLut::raw_to_index(float raw_log_sigma) const {
  return sigma_to_index(std::exp(static_cast<double>(raw_log_sigma)));
}

void EntropyLut::serialize(ByteWriter& w) const {
  w.magic("SQL1");
  w.u8(static_cast<std::uint8_t>(scales.size()));
  w.u16(static_cast<std::uint16_t>(window));
  for (float s : scales) w.f32(s);
  w.u8(static_cast<std::uint8_t>(z_rows.size()));
  for (const auto* set : {&rows, &z_rows}) {
    for (const FreqRow& row : *set) {
      for (std::uint16_t f : row.frequencies()) w.u16(f);
    }
  }
}

EntropyLut EntropyLut::parse(ByteReader& r) {
  r.expect_magic("SQL1");
  EntropyLut lut;
  const std::size_t n = r.u8();
  lut.window = r.u16();
  if (n == 0) throw FormatError("entropy LUT has no scales");
  if (lut.window < 1 || lut.window > 4096) throw FormatError("entropy LUT window out of range");
  for (std::size_t i = 0; i < n; ++i) {
    lut.scales.push_back(r.f32());
    if (!(lut.scales.back() > 0.0f) || (i > 0 && !(lut.scales[i] > lut.scales[i - 1]))) {
      throw FormatError("entropy LUT scales must be positive and strictly increasing");
    }
  }
  const std::size_t nz = r.u8();
  const std::size_t slots = static_cast<std::size_t>(2 * lut.window + 3);
  auto read_row = [&] {
    std::vector<std::uint16_t> f(slots);
    for (auto& v : f) v = r.u16();
    return FreqRow::from_frequencies(std::move(f));
  };
  for (std::size_t i = 0; i < n; ++i) lut.rows.push_back(read_row());
  for (std::size_t i = 0; i < nz; ++i) lut.z_rows.push_back(read_row());
  return lut;
}

EntropyLut build_entropy_luts(const LutParams& p) {
  if (!(p.sigma_min > 0.0) || !(p.sigma_max > p.sigma_min)) throw ConfigError("entropy LUT: bad sigma bounds");
  if (p.scales < 2 || p.scales > 255) throw ConfigError("entropy LUT: scale count must be in [2, 255]");
  if (p.z_channels < 0 || p.z_channels > 255) throw ConfigError("entropy LUT: bad z channel count");
  EntropyLut lut;
  lut.window = p.window;
  const double span = std::log(p.sigma_max / p.sigma_min);
  for (int i = 0; i < p.scales; ++i) {
    double s = i == p.scales - 1 ? p.sigma_max : p.sigma_min * std::exp(span * i / (p.scales - 1));
    lut.scales.push_back(static_cast<float>(s));
  }
  for (float s : lut.scales) lut.rows.push_back(gaussian_row(s, 0.0, p.window));

  Rng rng(hash3(p.seed, 0x51a1, 0));
  for (int c = 0; c < p.z_channels; ++c) {
    double mean = p.z_mean + 1.5 * rng.symmetric();
    double sigma = p.z_sigma * (1.0 + 0.25 * rng.symmetric());
    lut.z_rows.push_back(gaussian_row(sigma, mean, p.window));
  }
  return lut;
}

}  // namespace sqv::entropy
