#pragma once

#include <span>
#include <vector>

namespace sqv::eval {

struct RDPoint {
  double bpp = 0.0;
  double psnr = 0.0;
  bool operator==(const RDPoint&) const = default;
};
using RDCurve = std::vector<RDPoint>;

// >= 4 points, positive finite rates strictly increasing, finite PSNR
// strictly increasing. Throws ConfigError otherwise.
void check_curve(std::span<const RDPoint> c);

// Monotone piecewise-cubic Hermite interpolant (Fritsch-Carlson slopes with
// the usual three-point end conditions).
class Pchip {
 public:
  Pchip(std::vector<double> x, std::vector<double> y);
  double operator()(double x) const;
  // Exact integral of the interpolant over [a, b] within the knot range.
  double integral(double a, double b) const;
  double x_min() const { return x_.front(); }
  double x_max() const { return x_.back(); }

 private:
  double antiderivative(double x) const;  // from x_min
  std::size_t segment(double x) const;
  std::vector<double> x_, y_, m_, cum_;
};

// Average log-rate difference over the overlapping PSNR interval, as a
// percentage: (10^avg - 1) * 100. Throws RangeError without overlap.
double bd_rate(std::span<const RDPoint> baseline, std::span<const RDPoint> test);
// Average PSNR difference (test - baseline) over the overlapping log-rate interval.
double bd_psnr(std::span<const RDPoint> baseline, std::span<const RDPoint> test);

}  // namespace sqv::eval
