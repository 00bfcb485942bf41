#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "sqv/eval/bd.hpp"
#include "sqv/tensor.hpp"

namespace sqvtest {

using sqv::Tensor;

// Direct f64 nested loops, written from the textbook definitions.
inline std::vector<double> conv_oracle(const Tensor& x, const Tensor& w, const std::vector<float>& b, int s, int p) {
  const auto& xs = x.shape();
  const auto& ws = w.shape();
  const long k = ws.h;
  const long oh = (static_cast<long>(xs.h) + 2 * p - k) / s + 1;
  const long ow = (static_cast<long>(xs.w) + 2 * p - k) / s + 1;
  std::vector<double> out;
  for (std::size_t n = 0; n < xs.n; ++n)
    for (std::size_t o = 0; o < ws.n; ++o)
      for (long y = 0; y < oh; ++y)
        for (long xx = 0; xx < ow; ++xx) {
          double acc = b.empty() ? 0.0 : b[o];
          for (std::size_t c = 0; c < ws.c; ++c)
            for (long ky = 0; ky < k; ++ky)
              for (long kx = 0; kx < k; ++kx) {
                const long iy = y * s - p + ky, ix = xx * s - p + kx;
                if (iy < 0 || ix < 0 || iy >= static_cast<long>(xs.h) || ix >= static_cast<long>(xs.w)) continue;
                acc += static_cast<double>(x.at(n, c, iy, ix)) * w.at(o, c, ky, kx);
              }
          out.push_back(acc);
        }
  return out;
}

// Scatter form: every input pixel stamps the kernel into the output.
inline std::vector<double> deconv_oracle(const Tensor& x, const Tensor& w, const std::vector<float>& b, int s, int p) {
  const auto& xs = x.shape();
  const auto& ws = w.shape();
  const long k = ws.h;
  const long oh = (static_cast<long>(xs.h) - 1) * s - 2 * p + k;
  const long ow = (static_cast<long>(xs.w) - 1) * s - 2 * p + k;
  const std::size_t cout = ws.c;
  std::vector<double> out(xs.n * cout * oh * ow, 0.0);
  auto at = [&](std::size_t n, std::size_t o, long y, long xx) -> double& {
    return out[((n * cout + o) * oh + y) * ow + xx];
  };
  for (std::size_t n = 0; n < xs.n; ++n)
    for (std::size_t o = 0; o < cout; ++o)
      for (long y = 0; y < oh; ++y)
        for (long xx = 0; xx < ow; ++xx) at(n, o, y, xx) = b.empty() ? 0.0 : b[o];
  for (std::size_t n = 0; n < xs.n; ++n)
    for (std::size_t c = 0; c < xs.c; ++c)
      for (long iy = 0; iy < static_cast<long>(xs.h); ++iy)
        for (long ix = 0; ix < static_cast<long>(xs.w); ++ix)
          for (std::size_t o = 0; o < cout; ++o)
            for (long ky = 0; ky < k; ++ky)
              for (long kx = 0; kx < k; ++kx) {
                const long y = iy * s - p + ky, xx = ix * s - p + kx;
                if (y < 0 || xx < 0 || y >= oh || xx >= ow) continue;
                at(n, o, y, xx) += static_cast<double>(x.at(n, c, iy, ix)) * w.at(c, o, ky, kx);
              }
  return out;
}

// Independent PCHIP: Fritsch-Carlson interior slopes (weighted harmonic mean)
// and the shape-preserving three-point end formula.
struct RefPchip {
  std::vector<double> x, y, d;

  RefPchip(std::vector<double> xs, std::vector<double> ys) : x(std::move(xs)), y(std::move(ys)), d(x.size()) {
    const std::size_t n = x.size();
    std::vector<double> h(n - 1), del(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      h[i] = x[i + 1] - x[i];
      del[i] = (y[i + 1] - y[i]) / h[i];
    }
    for (std::size_t k = 1; k + 1 < n; ++k) {
      if (del[k - 1] * del[k] <= 0.0) {
        d[k] = 0.0;
      } else {
        const double w1 = 2 * h[k] + h[k - 1], w2 = h[k] + 2 * h[k - 1];
        d[k] = (w1 + w2) / (w1 / del[k - 1] + w2 / del[k]);
      }
    }
    auto end = [](double h0, double h1, double d0, double d1) {
      double s = ((2 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
      if (s * d0 <= 0.0) s = 0.0;
      else if (d0 * d1 <= 0.0 && std::abs(s) > std::abs(3 * d0)) s = 3 * d0;
      return s;
    };
    d[0] = end(h[0], h[1], del[0], del[1]);
    d[n - 1] = end(h[n - 2], h[n - 3], del[n - 2], del[n - 3]);
  }

  double operator()(double t) const {
    std::size_t i = 0;
    while (i + 2 < x.size() && t > x[i + 1]) ++i;
    const double h = x[i + 1] - x[i], s = (t - x[i]) / h;
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
    const double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
    return h00 * y[i] + h10 * h * d[i] + h01 * y[i + 1] + h11 * h * d[i + 1];
  }
};

inline double bd_rate_oracle(const sqv::eval::RDCurve& a, const sqv::eval::RDCurve& b) {
  auto interp = [](const sqv::eval::RDCurve& c) {
    std::vector<double> p, r;
    for (const auto& pt : c) {
      p.push_back(pt.psnr);
      r.push_back(std::log10(pt.bpp));
    }
    return RefPchip(p, r);
  };
  const RefPchip fa = interp(a), fb = interp(b);
  const double lo = std::max(a.front().psnr, b.front().psnr), hi = std::min(a.back().psnr, b.back().psnr);
  const int n = 10000;
  double s = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double t = lo + (hi - lo) * i / n;
    const double v = fb(t) - fa(t);
    s += (i == 0 || i == n) ? 0.5 * v : v;
  }
  const double avg = s / n;
  return (std::pow(10.0, avg) - 1.0) * 100.0;
}

}  // namespace sqvtest
