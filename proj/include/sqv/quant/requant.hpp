#pragma once

#include <cstdint>

namespace sqv::quant {

// Fixed-point multiplier: real ratio ~= multiplier * 2^(-31 - shift), with
// multiplier in [2^30, 2^31).
struct Requant {
  std::int32_t multiplier = 1 << 30;
  int shift = 0;

  double value() const;
  constexpr bool operator==(const Requant&) const = default;
};

// Encodes s_act * s_wt / s_out. Throws RangeError when a scale is not
// positive or the ratio falls outside [2^-32, 2^30).
Requant requant_multiplier(double s_act, double s_wt, double s_out);
Requant requant_from_ratio(double ratio);

// round_half_even(acc * ratio) using only an integer multiply and shift.
std::int32_t requant_scale(std::int32_t acc, const Requant& r);

// requant_scale(acc) + zp_out, clamped to [qmin, qmax].
std::int8_t apply_requant(std::int32_t acc, const Requant& r, std::int32_t zp_out, int qmin = -128,
                          int qmax = 127);

}  // namespace sqv::quant
