#include "sqv/eval/metrics.hpp"

#include <cmath>
#include <cstdio>

namespace sqv::eval {

double mse(const codec::Frame& a, const codec::Frame& b) {
  if (a.width != b.width || a.height != b.height) {
    throw ShapeError("frame dims", std::to_string(a.width) + "x" + std::to_string(a.height) + " vs " +
                                       std::to_string(b.width) + "x" + std::to_string(b.height));
  }
  std::uint64_t acc = 0;
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    const int d = static_cast<int>(a.samples[i]) - static_cast<int>(b.samples[i]);
    acc += static_cast<std::uint64_t>(d * d);
  }
  return static_cast<double>(acc) / static_cast<double>(a.samples.size());
}

double psnr_from_mse(double m) {
  if (m == 0.0) return kInfPsnr;
  return 10.0 * std::log10(255.0 * 255.0 / m);
}

double psnr(const codec::Frame& a, const codec::Frame& b) { return psnr_from_mse(mse(a, b)); }

std::vector<double> psnr_per_frame(std::span<const codec::Frame> ref, std::span<const codec::Frame> test) {
  if (ref.size() != test.size()) {
    throw ShapeError("frame count", std::to_string(ref.size()) + " vs " + std::to_string(test.size()));
  }
  std::vector<double> out;
  for (std::size_t i = 0; i < ref.size(); ++i) out.push_back(psnr(ref[i], test[i]));
  return out;
}

double mean_psnr(std::span<const std::vector<codec::Frame>> ref, std::span<const std::vector<codec::Frame>> test) {
  if (ref.size() != test.size()) throw ShapeError("clip count", "reference and test clip counts differ");
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t c = 0; c < ref.size(); ++c) {
    if (ref[c].size() != test[c].size()) throw ShapeError("frame count", "clip " + std::to_string(c));
    for (std::size_t i = 0; i < ref[c].size(); ++i) {
      sum += mse(ref[c][i], test[c][i]);
      ++n;
    }
  }
  if (n == 0) throw ShapeError("frame count", "no frames");
  return psnr_from_mse(sum / static_cast<double>(n));
}

double bpp(const codec::Bitstream& bs) {
  const double pixels = static_cast<double>(bs.frames.size()) * bs.width * bs.height;
  if (pixels == 0.0) throw ShapeError("bitstream", "no pixels");
  return 8.0 * static_cast<double>(bs.byte_size()) / pixels;
}

std::string format_psnr(double db) {
  if (std::isinf(db)) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", db);
  return buf;
}

}  // namespace sqv::eval
