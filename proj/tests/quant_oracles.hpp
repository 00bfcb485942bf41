#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "oracles.hpp"
#include "sqv/common/rng.hpp"
#include "sqv/quant/observer.hpp"
#include "sqv/quant/qconv.hpp"
#include "sqv/quant/qparams.hpp"

namespace sqvtest {

// One seeded integer conv or deconv layer against the f64 oracle run on the
// dequantized operands, requantized with f64 rounding. Returns the largest
// integer difference.
inline int qconv_trial(int t, sqv::Rng& pick) {
  using namespace sqv;
  using namespace sqv::quant;
  int max_diff = 0;
  const bool transposed = (t % 2) == 1;
  const std::size_t cin = 1 + pick.below(5), cout = 1 + pick.below(5);
  const int k = transposed ? static_cast<int>(2 + pick.below(3)) : static_cast<int>(1 + 2 * pick.below(2));
  const int s = 1 + static_cast<int>(pick.below(2));
  const int p = transposed ? static_cast<int>(pick.below(static_cast<std::uint64_t>(std::max(1, (k - 1) / 2 + 1))))
                           : (k - 1) / 2;
  const std::size_t h = 2 + pick.below(5), w = 2 + pick.below(5);
  const bool relu = pick.below(2) == 1;
  const Scheme as = pick.below(2) ? Scheme::affine : Scheme::symmetric;
  const Scheme ws = pick.below(2) ? Scheme::affine : Scheme::symmetric;
  const bool per_channel = pick.below(3) == 0;

  const Tensor xf = random_tensor({1, cin, h, w}, 10000 + t, -2.0, 3.0);
  const std::size_t uk = static_cast<std::size_t>(k);
  const Tensor wf = transposed ? random_tensor({cin, cout, uk, uk}, 20000 + t, -1.0, 1.0)
                               : random_tensor({cout, cin, uk, uk}, 20000 + t, -1.0, 1.0);
  auto ao = Observer::min_max();
  ao.observe(xf);
  const QParams aq = compute_qparams(ao, as);
  auto wo = Observer::min_max(per_channel ? Granularity::per_channel_axis(transposed ? 1 : 0)
                                          : Granularity::per_tensor());
  wo.observe(wf);
  const QParams wq = compute_qparams(wo, ws);
  std::vector<float> bf(cout);
  for (auto& b : bf) b = static_cast<float>(pick.symmetric());
  const TensorI8 xq = quantize(xf, aq);
  const TensorI8 wqt = quantize(wf, wq);
  const auto bq = quantize_bias(bf, aq.scales[0], wq);

  // Oracle inputs: exactly the dequantized integers.
  const Tensor xd = dequantize(xq, aq);
  const Tensor wd = dequantize(wqt, wq);
  std::vector<float> bd(cout);
  for (std::size_t o = 0; o < cout; ++o) {
    bd[o] = static_cast<float>(bq[o] * static_cast<double>(aq.scales[0]) * wq.scales[per_channel ? o : 0]);
  }
  const auto ref = transposed ? sqvtest::deconv_oracle(xd, wd, bd, s, p) : sqvtest::conv_oracle(xd, wd, bd, s, p);
  double lo = 0, hi = 0;
  for (double v : ref) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const Scheme os = pick.below(2) ? Scheme::affine : Scheme::symmetric;
  const auto [so, zo] = qparams_from_range(lo * 0.8, hi * 0.8, os);  // some clipping too
  const QParams oq = QParams::per_tensor(os, so, zo);
  const QConvOptions opt{s, p, relu};
  const TensorI8 y = transposed ? qconv_transpose2d(xq, wqt, bq, aq, wq, oq, opt) : qconv2d(xq, wqt, bq, aq, wq, oq, opt);
  if (y.numel() != ref.size()) return 1 << 20;
  const int qlo = relu ? std::max(oq.qmin(), zo) : oq.qmin();
  for (std::size_t i = 0; i < ref.size(); ++i) {
    const double q = std::clamp(std::nearbyint(ref[i] / so) + zo, static_cast<double>(qlo), 127.0);
    max_diff = std::max(max_diff, static_cast<int>(std::abs(q - y.values()[i])));
  }
  return max_diff;
}

}  // namespace sqvtest
