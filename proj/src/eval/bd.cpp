#include "sqv/eval/bd.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sqv/common/error.hpp"

namespace sqv::eval {

void check_curve(std::span<const RDPoint> c) {
  if (c.size() < 4) throw ConfigError("RD curve needs at least 4 points, got " + std::to_string(c.size()));
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (!(c[i].bpp > 0.0) || !std::isfinite(c[i].bpp)) throw ConfigError("RD curve rates must be positive");
    if (!std::isfinite(c[i].psnr)) throw ConfigError("RD curve PSNR must be finite");
    if (i > 0 && !(c[i].bpp > c[i - 1].bpp)) throw ConfigError("RD curve rates must strictly increase");
    if (i > 0 && !(c[i].psnr > c[i - 1].psnr)) throw ConfigError("RD curve PSNR must strictly increase");
  }
}

namespace {

double sign(double v) { return (v > 0.0) - (v < 0.0); }

double end_slope(double h0, double h1, double d0, double d1) {
  double m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
  if (sign(m) != sign(d0)) return 0.0;
  if (sign(d0) != sign(d1) && std::abs(m) > 3.0 * std::abs(d0)) return 3.0 * d0;
  return m;
}

}  // namespace

Pchip::Pchip(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
  const std::size_t n = x_.size();
  if (n < 2 || y_.size() != n) throw ConfigError("pchip needs >= 2 matching knots");
  for (std::size_t i = 1; i < n; ++i) {
    if (!(x_[i] > x_[i - 1])) throw ConfigError("pchip knots must strictly increase");
  }
  std::vector<double> h(n - 1), d(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = x_[i + 1] - x_[i];
    d[i] = (y_[i + 1] - y_[i]) / h[i];
  }
  m_.assign(n, 0.0);
  if (n == 2) {
    m_[0] = m_[1] = d[0];
  } else {
    for (std::size_t k = 1; k + 1 < n; ++k) {
      if (d[k - 1] * d[k] <= 0.0) continue;
      const double w1 = 2.0 * h[k] + h[k - 1], w2 = h[k] + 2.0 * h[k - 1];
      m_[k] = (w1 + w2) / (w1 / d[k - 1] + w2 / d[k]);
    }
    m_[0] = end_slope(h[0], h[1], d[0], d[1]);
    m_[n - 1] = end_slope(h[n - 2], h[n - 3], d[n - 2], d[n - 3]);
  }
  cum_.assign(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double hh = h[i];
    // Full-segment integral of the Hermite cubic.
    cum_[i + 1] = cum_[i] + hh * (0.5 * (y_[i] + y_[i + 1]) + hh * (m_[i] - m_[i + 1]) / 12.0);
  }
}

std::size_t Pchip::segment(double x) const {
  auto it = std::upper_bound(x_.begin(), x_.end(), x);
  std::size_t i = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
  return std::min(i, x_.size() - 2);
}

double Pchip::operator()(double x) const {
  const std::size_t i = segment(x);
  const double h = x_[i + 1] - x_[i], t = (x - x_[i]) / h;
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * y_[i] + (t3 - 2 * t2 + t) * h * m_[i] + (-2 * t3 + 3 * t2) * y_[i + 1] +
         (t3 - t2) * h * m_[i + 1];
}

double Pchip::antiderivative(double x) const {
  const std::size_t i = segment(x);
  const double h = x_[i + 1] - x_[i], t = (x - x_[i]) / h;
  const double t2 = t * t, t3 = t2 * t, t4 = t3 * t;
  const double a00 = t - t3 + 0.5 * t4;
  const double a10 = 0.5 * t2 - 2.0 * t3 / 3.0 + 0.25 * t4;
  const double a01 = t3 - 0.5 * t4;
  const double a11 = -t3 / 3.0 + 0.25 * t4;
  return cum_[i] + h * (a00 * y_[i] + a10 * h * m_[i] + a01 * y_[i + 1] + a11 * h * m_[i + 1]);
}

double Pchip::integral(double a, double b) const { return antiderivative(b) - antiderivative(a); }

namespace {

struct Axes {
  std::vector<double> x, y;
};

Axes axes(std::span<const RDPoint> c, bool rate_of_psnr) {
  Axes a;
  for (const RDPoint& p : c) {
    const double lr = std::log10(p.bpp);
    a.x.push_back(rate_of_psnr ? p.psnr : lr);
    a.y.push_back(rate_of_psnr ? lr : p.psnr);
  }
  return a;
}

double average_difference(std::span<const RDPoint> base, std::span<const RDPoint> test, bool rate_of_psnr) {
  check_curve(base);
  check_curve(test);
  Axes ab = axes(base, rate_of_psnr), at = axes(test, rate_of_psnr);
  const Pchip pb(ab.x, ab.y), pt(at.x, at.y);
  const double lo = std::max(pb.x_min(), pt.x_min());
  const double hi = std::min(pb.x_max(), pt.x_max());
  if (!(hi > lo)) throw RangeError("RD curves do not overlap");
  return (pt.integral(lo, hi) - pb.integral(lo, hi)) / (hi - lo);
}

}  // namespace

double bd_rate(std::span<const RDPoint> baseline, std::span<const RDPoint> test) {
  return (std::pow(10.0, average_difference(baseline, test, true)) - 1.0) * 100.0;
}

double bd_psnr(std::span<const RDPoint> baseline, std::span<const RDPoint> test) {
  return average_difference(baseline, test, false);
}

}  // namespace sqv::eval
