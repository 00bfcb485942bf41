#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "sqv/quant/qparams.hpp"
#include "sqv/tensor.hpp"

namespace sqv::quant {

enum class ObserverKind : std::uint8_t { min_max, moving_average_min_max, histogram };

std::string_view observer_name(ObserverKind kind);
ObserverKind parse_observer(std::string_view name);

inline constexpr std::size_t kHistogramBins = 2048;
inline constexpr double kDefaultAveragingConstant = 0.01;

// Fixed-range histogram. Bins cover [lo, hi) uniformly; `min`/`max` are the
// exact extremes seen so far.
struct Histogram {
  std::vector<std::uint64_t> counts;
  double lo = 0.0;
  double hi = 0.0;
  double min = 0.0;
  double max = 0.0;

  double bin_width() const { return (hi - lo) / static_cast<double>(counts.size()); }
  std::uint64_t total() const;
};

// Calibration statistics collector. min_max and moving_average_min_max keep
// one (min, max) pair per slice; histogram is per-tensor only.
class Observer {
 public:
  static Observer min_max(Granularity g = Granularity::per_tensor());
  static Observer moving_average_min_max(double c = kDefaultAveragingConstant,
                                         Granularity g = Granularity::per_tensor());
  static Observer histogram(std::size_t bins = kHistogramBins);

  // Folds one batch into the statistics. A histogram whose range cannot hold
  // the batch doubles its width (merging adjacent bin pairs) until it can.
  void observe(const Tensor& t);

  ObserverKind kind() const { return kind_; }
  const Granularity& granularity() const { return granularity_; }
  double averaging_constant() const { return c_; }
  std::uint64_t batches() const { return batches_; }
  bool empty() const { return batches_ == 0; }
  std::size_t slices() const { return mins_.size(); }
  double min(std::size_t slice = 0) const { return mins_.at(slice); }
  double max(std::size_t slice = 0) const { return maxs_.at(slice); }
  const Histogram& hist() const { return hist_; }

 private:
  Observer(ObserverKind kind, Granularity g, double c) : kind_(kind), granularity_(g), c_(c) {}
  void observe_histogram(std::span<const float> v);

  ObserverKind kind_;
  Granularity granularity_;
  double c_ = kDefaultAveragingConstant;
  std::uint64_t batches_ = 0;
  std::vector<double> mins_, maxs_;
  Histogram hist_;
};

// The clipping range [lo', hi'] that minimizes the count-weighted squared
// 8-bit quantization error of the bin centers, searched over a 64 x 64 grid of
// bin-edge candidates spanning the occupied bins. Ties: narrower range, then
// smaller left edge.
std::pair<double, double> histogram_best_range(const Histogram& hist);

// Squared-error objective used by histogram_best_range for edges [l, r).
double histogram_range_error(const Histogram& hist, std::size_t left_edge, std::size_t right_edge);

inline constexpr std::size_t kBestRangeGrid = 64;

// Scale / zero-point from observed statistics. Throws ConfigError for an
// empty observer or a per-channel histogram.
QParams compute_qparams(const Observer& obs, Scheme scheme);

// The scheme formulas applied to one (min, max) pair.
std::pair<float, std::int32_t> qparams_from_range(double min, double max, Scheme scheme);

}  // namespace sqv::quant
