#include "sqv/quant/qconv.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>

#include "sqv/quant/requant.hpp"
#include "sqv/simd/kernels.hpp"

namespace sqv::quant {

namespace {

struct Geometry {
  std::size_t n, cin, cout, h, w, k, oh, ow;
};

constexpr std::size_t kLanePad = 16;

std::size_t padded(std::size_t n) { return (n + kLanePad - 1) / kLanePad * kLanePad; }

void check_qparams(const QParams& act_qp, const QParams& wt_qp, const QParams& out_qp, std::size_t cout, int wt_axis) {
  if (act_qp.granularity.per_channel || act_qp.slices() != 1) throw ConfigError("qconv: activations must be per-tensor");
  if (out_qp.granularity.per_channel || out_qp.slices() != 1) throw ConfigError("qconv: output must be per-tensor");
  if (wt_qp.granularity.per_channel) {
    if (wt_qp.granularity.axis != wt_axis) throw ConfigError("qconv: per-channel weights must slice the output channel");
    if (wt_qp.slices() != cout) {
      throw ShapeError("weight_qp.slices vs cout", std::to_string(wt_qp.slices()) + " vs " + std::to_string(cout));
    }
  } else if (wt_qp.slices() != 1) {
    throw ConfigError("qconv: per-tensor weights need a single scale");
  }
}

// Weight rows as int16 (q_w - zp_w) in (ic, ky, kx) order, one row per output
// channel, zero-padded to a multiple of 16 lanes.
std::vector<std::int16_t> weight_rows(const TensorI8& weight, const QParams& wt_qp, const Geometry& g, bool transposed,
                                      std::size_t kpad) {
  std::vector<std::int16_t> rows(g.cout * kpad, 0);
  for (std::size_t oc = 0; oc < g.cout; ++oc) {
    std::int32_t zp = wt_qp.zero_points[wt_qp.granularity.per_channel ? oc : 0];
    std::size_t t = 0;
    for (std::size_t ic = 0; ic < g.cin; ++ic) {
      for (std::size_t ky = 0; ky < g.k; ++ky) {
        for (std::size_t kx = 0; kx < g.k; ++kx) {
          std::int8_t q = transposed ? weight.at(ic, oc, ky, kx) : weight.at(oc, ic, ky, kx);
          rows[oc * kpad + t++] = static_cast<std::int16_t>(q - zp);
        }
      }
    }
  }
  return rows;
}

void check_overflow(const TensorI8& weight, const QParams& act_qp, const QParams& wt_qp,
                    std::span<const std::int32_t> bias, std::size_t taps) {
  const std::int64_t zpa = act_qp.zero_points[0];
  const std::int64_t max_da = std::max<std::int64_t>(act_qp.qmax() - zpa, zpa - act_qp.qmin());
  std::int64_t max_dw = 0;
  for (std::size_t s = 0; s < wt_qp.slices(); ++s) {
    const std::int64_t zpw = wt_qp.zero_points[s];
    max_dw = std::max({max_dw, wt_qp.qmax() - zpw, zpw - wt_qp.qmin()});
  }
  std::int64_t max_bias = 0;
  for (std::int32_t b : bias) max_bias = std::max<std::int64_t>(max_bias, std::llabs(b));
  const std::int64_t bound = static_cast<std::int64_t>(taps) * max_da * max_dw + max_bias;
  (void)weight;
  if (bound > std::numeric_limits<std::int32_t>::max()) {
    throw RangeError("qconv: accumulator bound " + std::to_string(bound) + " exceeds int32");
  }
}

TensorI8 run(const TensorI8& act, const TensorI8& weight, std::span<const std::int32_t> bias, const QParams& act_qp,
             const QParams& wt_qp, const QParams& out_qp, const QConvOptions& opt, bool transposed) {
  const Shape& as = act.shape();
  const Shape& ws = weight.shape();
  const std::size_t cout = transposed ? ws.c : ws.n;
  const std::size_t cin = transposed ? ws.n : ws.c;
  if (as.c != cin) throw ShapeError("input.c vs weight.cin", std::to_string(as.c) + " vs " + std::to_string(cin));
  if (ws.h != ws.w) throw ShapeError("weight.h vs weight.w", "kernel must be square");
  if (bias.size() != cout) throw ShapeError("bias.len vs cout", std::to_string(bias.size()) + " vs " + std::to_string(cout));
  if (opt.stride < 1 || opt.padding < 0) throw ConfigError("qconv: stride must be >= 1 and padding >= 0");
  check_qparams(act_qp, wt_qp, out_qp, cout, transposed ? 1 : 0);

  const auto k = static_cast<std::ptrdiff_t>(ws.h);
  const std::ptrdiff_t s = opt.stride, p = opt.padding;
  const auto h = static_cast<std::ptrdiff_t>(as.h), w = static_cast<std::ptrdiff_t>(as.w);
  std::ptrdiff_t oh, ow;
  if (transposed) {
    oh = (h - 1) * s - 2 * p + k;
    ow = (w - 1) * s - 2 * p + k;
  } else {
    oh = (h + 2 * p - k) / s + 1;
    ow = (w + 2 * p - k) / s + 1;
    if (h + 2 * p < k || w + 2 * p < k) oh = ow = 0;
  }
  if (oh <= 0 || ow <= 0) throw ShapeError("output.h/w", "non-positive output extent for input " + as.str());

  Geometry g{as.n, cin, cout, as.h, as.w, ws.h, static_cast<std::size_t>(oh), static_cast<std::size_t>(ow)};
  const std::size_t taps = cin * g.k * g.k;
  const std::size_t kpad = padded(taps);
  check_overflow(weight, act_qp, wt_qp, bias, taps);

  auto rows = weight_rows(weight, wt_qp, g, transposed, kpad);
  std::vector<Requant> rq(cout);
  for (std::size_t oc = 0; oc < cout; ++oc) {
    float sw = wt_qp.scales[wt_qp.granularity.per_channel ? oc : 0];
    rq[oc] = requant_multiplier(act_qp.scales[0], sw, out_qp.scales[0]);
  }
  const std::int32_t zpa = act_qp.zero_points[0];
  const std::int32_t zpo = out_qp.zero_points[0];
  const int lo = opt.relu ? std::max(out_qp.qmin(), zpo) : out_qp.qmin();
  const int hi = out_qp.qmax();

  TensorI8 out(Shape{g.n, cout, g.oh, g.ow});
  std::vector<std::int16_t> patch(kpad, 0);
  for (std::size_t b = 0; b < g.n; ++b) {
    for (std::ptrdiff_t oy = 0; oy < oh; ++oy) {
      for (std::ptrdiff_t ox = 0; ox < ow; ++ox) {
        std::size_t t = 0;
        for (std::size_t ic = 0; ic < cin; ++ic) {
          for (std::ptrdiff_t ky = 0; ky < k; ++ky) {
            for (std::ptrdiff_t kx = 0; kx < k; ++kx, ++t) {
              std::ptrdiff_t iy, ix;
              bool valid;
              if (transposed) {
                std::ptrdiff_t ny = oy + p - ky, nx = ox + p - kx;
                valid = ny >= 0 && nx >= 0 && ny % s == 0 && nx % s == 0;
                iy = ny / s;
                ix = nx / s;
                valid = valid && iy < h && ix < w;
              } else {
                iy = oy * s - p + ky;
                ix = ox * s - p + kx;
                valid = iy >= 0 && ix >= 0 && iy < h && ix < w;
              }
              patch[t] = valid ? static_cast<std::int16_t>(
                                     act.at(b, ic, static_cast<std::size_t>(iy), static_cast<std::size_t>(ix)) - zpa)
                               : std::int16_t{0};
            }
          }
        }
        for (std::size_t oc = 0; oc < cout; ++oc) {
          std::int32_t acc = bias[oc] + simd::dot_i16(std::span<const std::int16_t>(patch),
                                                      std::span<const std::int16_t>(rows).subspan(oc * kpad, kpad));
          out.at(b, oc, static_cast<std::size_t>(oy), static_cast<std::size_t>(ox)) =
              apply_requant(acc, rq[oc], zpo, lo, hi);
        }
      }
    }
  }
  return out;
}

}  // namespace

TensorI8 qconv2d(const TensorI8& act, const TensorI8& weight, std::span<const std::int32_t> bias, const QParams& act_qp,
                 const QParams& wt_qp, const QParams& out_qp, const QConvOptions& opt) {
  return run(act, weight, bias, act_qp, wt_qp, out_qp, opt, false);
}

TensorI8 qconv_transpose2d(const TensorI8& act, const TensorI8& weight, std::span<const std::int32_t> bias,
                           const QParams& act_qp, const QParams& wt_qp, const QParams& out_qp,
                           const QConvOptions& opt) {
  return run(act, weight, bias, act_qp, wt_qp, out_qp, opt, true);
}

std::vector<std::int32_t> quantize_bias(std::span<const float> bias, float act_scale, const QParams& wt_qp) {
  std::vector<std::int32_t> out(bias.size());
  for (std::size_t o = 0; o < bias.size(); ++o) {
    float sw = wt_qp.scales[wt_qp.granularity.per_channel ? o : 0];
    double scale = static_cast<double>(act_scale) * static_cast<double>(sw);
    double q = round_half_even(static_cast<double>(bias[o]) / scale);
    if (!(std::abs(q) <= 1e9)) throw RangeError("bias " + std::to_string(bias[o]) + " overflows int32 at its scale");
    out[o] = static_cast<std::int32_t>(q);
  }
  return out;
}

}  // namespace sqv::quant
