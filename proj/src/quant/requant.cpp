#include "sqv/quant/requant.hpp"

#include <algorithm>
#include <cmath>

#include "sqv/common/error.hpp"
#include "sqv/quant/qparams.hpp"

namespace sqv::quant {

double Requant::value() const { return std::ldexp(static_cast<double>(multiplier), -31 - shift); }

Requant requant_from_ratio(double ratio) {
  if (!(ratio > 0.0) || !std::isfinite(ratio)) throw RangeError("requant: ratio must be positive and finite");
  int e = 0;
  double f = std::frexp(ratio, &e);  // ratio = f * 2^e, f in [0.5, 1)
  auto m = static_cast<std::int64_t>(round_half_even(std::ldexp(f, 31)));
  if (m == (std::int64_t{1} << 31)) {
    m >>= 1;
    ++e;
  }
  // Total right shift 31 - e must stay within [1, 62] for the int64 product.
  if (e < -31 || e > 30) throw RangeError("requant: ratio " + std::to_string(ratio) + " not representable");
  return {static_cast<std::int32_t>(m), -e};
}

Requant requant_multiplier(double s_act, double s_wt, double s_out) {
  if (!(s_act > 0.0) || !(s_wt > 0.0) || !(s_out > 0.0)) throw RangeError("requant: scales must be positive");
  return requant_from_ratio(s_act * s_wt / s_out);
}

std::int32_t requant_scale(std::int32_t acc, const Requant& r) {
  const int n = 31 + r.shift;
  const std::int64_t prod = static_cast<std::int64_t>(acc) * r.multiplier;
  const std::int64_t half = std::int64_t{1} << (n - 1);
  const std::int64_t mask = (std::int64_t{1} << n) - 1;
  std::int64_t q = prod >> n;  // floor
  const std::int64_t rem = prod & mask;
  if (rem > half || (rem == half && (q & 1) != 0)) ++q;
  return static_cast<std::int32_t>(std::clamp<std::int64_t>(q, INT32_MIN, INT32_MAX));
}

std::int8_t apply_requant(std::int32_t acc, const Requant& r, std::int32_t zp_out, int qmin, int qmax) {
  std::int64_t v = static_cast<std::int64_t>(requant_scale(acc, r)) + zp_out;
  return static_cast<std::int8_t>(std::clamp<std::int64_t>(v, qmin, qmax));
}

}  // namespace sqv::quant
