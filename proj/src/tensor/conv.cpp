#include "sqv/conv.hpp"

#include <string>
#include <vector>

namespace sqv {

ConvGeometry conv_geometry(const Shape& in, const Shape& wt, std::size_t bias_len, int stride, int padding,
                           bool transposed) {
  if (stride < 1) throw ShapeError("stride", "stride must be >= 1, got " + std::to_string(stride));
  if (padding < 0) throw ShapeError("padding", "padding must be >= 0, got " + std::to_string(padding));
  if (wt.h != wt.w) throw ShapeError("weight.h vs weight.w", "kernels must be square, got " + wt.str());
  const std::size_t cin = transposed ? wt.n : wt.c;
  const std::size_t cout = transposed ? wt.c : wt.n;
  if (in.c != cin) {
    throw ShapeError(transposed ? "input.c vs weight.n" : "input.c vs weight.c",
                     "input " + in.str() + " does not match weight " + wt.str());
  }
  if (bias_len != 0 && bias_len != cout) {
    throw ShapeError("bias.len vs cout", std::to_string(bias_len) + " vs " + std::to_string(cout));
  }
  const long k = static_cast<long>(wt.h);
  const long s = stride, p = padding;
  long oh, ow;
  if (transposed) {
    oh = (static_cast<long>(in.h) - 1) * s - 2 * p + k;
    ow = (static_cast<long>(in.w) - 1) * s - 2 * p + k;
  } else {
    const long nh = static_cast<long>(in.h) + 2 * p - k;
    const long nw = static_cast<long>(in.w) + 2 * p - k;
    if (nh < 0 || nw < 0) throw ShapeError("input.h/w vs kernel", "kernel larger than padded input");
    oh = nh / s + 1;
    ow = nw / s + 1;
  }
  if (in.h == 0 || in.w == 0 || oh <= 0 || ow <= 0) {
    throw ShapeError("output.h/w", "empty output for input " + in.str() + " and weight " + wt.str());
  }
  return {cin, cout, static_cast<std::size_t>(k), static_cast<std::size_t>(oh), static_cast<std::size_t>(ow)};
}

namespace {

// Gathered receptive field for one output position: input values and the
// flat (ic, ky, kx) tap index each came from.
struct Patch {
  std::vector<float> x;
  std::vector<std::size_t> tap;
  std::vector<float> w;
};

template <class Gather>
Tensor run_conv(const Tensor& input, const Tensor& weight, std::span<const float> bias, const ConvParams& params,
                const FloatEngine& engine, const ConvGeometry& g, bool transposed, Gather gather) {
  const Shape& in = input.shape();
  Tensor out(Shape{in.n, g.cout, g.out_h, g.out_w});
  const auto wdata = weight.data();
  const std::size_t kk = g.k * g.k;
  Patch patch;
  for (std::size_t n = 0; n < in.n; ++n) {
    for (std::size_t oy = 0; oy < g.out_h; ++oy) {
      for (std::size_t ox = 0; ox < g.out_w; ++ox) {
        patch.x.clear();
        patch.tap.clear();
        gather(n, oy, ox, patch);
        patch.w.resize(patch.tap.size());
        for (std::size_t oc = 0; oc < g.cout; ++oc) {
          for (std::size_t j = 0; j < patch.tap.size(); ++j) {
            const std::size_t t = patch.tap[j];
            const std::size_t ic = t / kk, r = t % kk;
            const std::size_t wi = transposed ? (ic * g.cout + oc) * kk + r : (oc * g.cin + ic) * kk + r;
            patch.w[j] = wdata[wi];
          }
          const float b = bias.empty() ? 0.0f : bias[oc];
          const std::size_t oi = out.index(n, oc, oy, ox);
          out.data()[oi] = dot(b, patch.w, patch.x, engine, ulp_key(engine, params.layer, oi));
        }
      }
    }
  }
  return out;
}

}  // namespace

Tensor conv2d(const Tensor& input, const Tensor& weight, std::span<const float> bias, const ConvParams& params,
              const FloatEngine& engine) {
  const auto g = conv_geometry(input.shape(), weight.shape(), bias.size(), params.stride, params.padding, false);
  const long h = static_cast<long>(input.shape().h), w = static_cast<long>(input.shape().w);
  const long s = params.stride, p = params.padding, k = static_cast<long>(g.k);
  return run_conv(input, weight, bias, params, engine, g, false,
                  [&](std::size_t n, std::size_t oy, std::size_t ox, Patch& patch) {
                    for (std::size_t ic = 0; ic < g.cin; ++ic) {
                      for (long ky = 0; ky < k; ++ky) {
                        const long iy = static_cast<long>(oy) * s - p + ky;
                        if (iy < 0 || iy >= h) continue;
                        for (long kx = 0; kx < k; ++kx) {
                          const long ix = static_cast<long>(ox) * s - p + kx;
                          if (ix < 0 || ix >= w) continue;
                          patch.x.push_back(input.at(n, ic, iy, ix));
                          patch.tap.push_back((ic * g.k + ky) * g.k + kx);
                        }
                      }
                    }
                  });
}

Tensor conv_transpose2d(const Tensor& input, const Tensor& weight, std::span<const float> bias,
                        const ConvParams& params, const FloatEngine& engine) {
  const auto g = conv_geometry(input.shape(), weight.shape(), bias.size(), params.stride, params.padding, true);
  const long h = static_cast<long>(input.shape().h), w = static_cast<long>(input.shape().w);
  const long s = params.stride, p = params.padding, k = static_cast<long>(g.k);
  return run_conv(input, weight, bias, params, engine, g, true,
                  [&](std::size_t n, std::size_t oy, std::size_t ox, Patch& patch) {
                    for (std::size_t ic = 0; ic < g.cin; ++ic) {
                      for (long ky = 0; ky < k; ++ky) {
                        const long ny = static_cast<long>(oy) + p - ky;
                        if (ny < 0 || ny % s != 0 || ny / s >= h) continue;
                        for (long kx = 0; kx < k; ++kx) {
                          const long nx = static_cast<long>(ox) + p - kx;
                          if (nx < 0 || nx % s != 0 || nx / s >= w) continue;
                          patch.x.push_back(input.at(n, ic, ny / s, nx / s));
                          patch.tap.push_back((ic * g.k + ky) * g.k + kx);
                        }
                      }
                    }
                  });
}

}  // namespace sqv
