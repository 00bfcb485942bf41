#include "sqv/quant/observer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace sqv::quant {

std::string_view observer_name(ObserverKind kind) {
  switch (kind) {
    case ObserverKind::min_max: return "minmax";
    case ObserverKind::moving_average_min_max: return "movingavg";
    case ObserverKind::histogram: return "histogram";
  }
  return "?";
}

ObserverKind parse_observer(std::string_view name) {
  if (name == "minmax") return ObserverKind::min_max;
  if (name == "movingavg" || name == "ma") return ObserverKind::moving_average_min_max;
  if (name == "histogram" || name == "hist") return ObserverKind::histogram;
  throw ConfigError("unknown observer '" + std::string(name) + "'");
}

std::uint64_t Histogram::total() const { return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0}); }

Observer Observer::min_max(Granularity g) { return Observer(ObserverKind::min_max, g, 1.0); }

Observer Observer::moving_average_min_max(double c, Granularity g) {
  if (!(c > 0.0 && c <= 1.0)) throw ConfigError("moving-average constant must lie in (0, 1]");
  return Observer(ObserverKind::moving_average_min_max, g, c);
}

Observer Observer::histogram(std::size_t bins) {
  if (bins < 2 || bins % 2 != 0) throw ConfigError("histogram bin count must be even and >= 2");
  Observer o(ObserverKind::histogram, Granularity::per_tensor(), 1.0);
  o.hist_.counts.assign(bins, 0);
  return o;
}

void Observer::observe(const Tensor& t) {
  if (t.numel() == 0) return;
  if (kind_ == ObserverKind::histogram) {
    observe_histogram(t.data());
    ++batches_;
    return;
  }

  const Shape& s = t.shape();
  std::size_t nslices = 1;
  if (granularity_.per_channel) nslices = granularity_.axis == 0 ? s.n : s.c;
  if (batches_ > 0 && nslices != mins_.size()) {
    throw ShapeError("observer.slices vs tensor channel axis",
                     std::to_string(mins_.size()) + " slices, batch shape " + s.str());
  }

  std::vector<double> bmin(nslices, std::numeric_limits<double>::infinity());
  std::vector<double> bmax(nslices, -std::numeric_limits<double>::infinity());
  auto v = t.data();
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::size_t k = slice_of(s, granularity_, i);
    bmin[k] = std::min(bmin[k], static_cast<double>(v[i]));
    bmax[k] = std::max(bmax[k], static_cast<double>(v[i]));
  }

  if (batches_ == 0) {
    mins_ = bmin;
    maxs_ = bmax;
  } else if (kind_ == ObserverKind::min_max) {
    for (std::size_t k = 0; k < nslices; ++k) {
      mins_[k] = std::min(mins_[k], bmin[k]);
      maxs_[k] = std::max(maxs_[k], bmax[k]);
    }
  } else {
    for (std::size_t k = 0; k < nslices; ++k) {
      mins_[k] += c_ * (bmin[k] - mins_[k]);
      maxs_[k] += c_ * (bmax[k] - maxs_[k]);
    }
  }
  ++batches_;
}

void Observer::observe_histogram(std::span<const float> v) {
  double bmin = std::numeric_limits<double>::infinity();
  double bmax = -bmin;
  for (float x : v) {
    bmin = std::min(bmin, static_cast<double>(x));
    bmax = std::max(bmax, static_cast<double>(x));
  }
  Histogram& h = hist_;
  const std::size_t nb = h.counts.size();
  if (batches_ == 0) {
    h.min = bmin;
    h.max = bmax;
    h.lo = bmin;
    h.hi = bmax;
    if (!(h.hi > h.lo)) {
      h.lo = bmin - 0.5;
      h.hi = bmin + 0.5;
    }
  } else {
    h.min = std::min(h.min, bmin);
    h.max = std::max(h.max, bmax);
  }

  // Grow by doubling the width toward whichever side is exceeded more, merging
  // bin pairs so previously counted data keeps its position.
  while (bmin < h.lo || bmax > h.hi) {
    double width = h.hi - h.lo;
    double up = std::max(0.0, bmax - h.hi);
    double down = std::max(0.0, h.lo - bmin);
    std::vector<std::uint64_t> merged(nb, 0);
    if (up >= down) {
      for (std::size_t i = 0; i < nb / 2; ++i) merged[i] = h.counts[2 * i] + h.counts[2 * i + 1];
      h.hi = h.lo + 2.0 * width;
    } else {
      for (std::size_t i = 0; i < nb / 2; ++i) merged[nb / 2 + i] = h.counts[2 * i] + h.counts[2 * i + 1];
      h.lo = h.hi - 2.0 * width;
    }
    h.counts = std::move(merged);
  }

  // A value exactly on hi goes to the last bin.
  const double scale = static_cast<double>(nb) / (h.hi - h.lo);
  for (float x : v) {
    double pos = (static_cast<double>(x) - h.lo) * scale;
    auto b = static_cast<std::size_t>(std::clamp(pos, 0.0, static_cast<double>(nb - 1)));
    ++h.counts[b];
  }
}

double histogram_range_error(const Histogram& hist, std::size_t left_edge, std::size_t right_edge) {
  const double bw = hist.bin_width();
  const double lo = hist.lo + static_cast<double>(left_edge) * bw;
  const double hi = hist.lo + static_cast<double>(right_edge) * bw;
  const double step = (hi - lo) / 255.0;
  double err = 0.0;
  for (std::size_t b = 0; b < hist.counts.size(); ++b) {
    if (hist.counts[b] == 0) continue;
    double c = hist.lo + (static_cast<double>(b) + 0.5) * bw;
    double q = std::clamp(round_half_even((c - lo) / step), 0.0, 255.0);
    double d = c - (lo + q * step);
    err += static_cast<double>(hist.counts[b]) * d * d;
  }
  return err;
}

std::pair<double, double> histogram_best_range(const Histogram& hist) {
  const std::size_t nb = hist.counts.size();
  std::size_t first = nb, last = 0;
  for (std::size_t b = 0; b < nb; ++b) {
    if (hist.counts[b] == 0) continue;
    first = std::min(first, b);
    last = b;
  }
  if (first == nb || !(hist.hi > hist.lo)) throw ConfigError("histogram_best_range: empty histogram");

  const std::size_t e_lo = first, e_hi = last + 1, span = e_hi - e_lo;
  double best_err = std::numeric_limits<double>::infinity();
  std::size_t best_l = e_lo, best_r = e_hi;
  for (std::size_t i = 0; i < kBestRangeGrid; ++i) {
    std::size_t l = e_lo + i * span / kBestRangeGrid;
    for (std::size_t j = 0; j < kBestRangeGrid; ++j) {
      std::size_t r = e_hi - j * span / kBestRangeGrid;
      if (l >= r) continue;
      double err = histogram_range_error(hist, l, r);
      bool better = err < best_err;
      if (err == best_err) {
        std::size_t w = r - l, bw = best_r - best_l;
        better = w < bw || (w == bw && l < best_l);
      }
      if (better) {
        best_err = err;
        best_l = l;
        best_r = r;
      }
    }
  }
  const double w = hist.bin_width();
  return {hist.lo + static_cast<double>(best_l) * w, hist.lo + static_cast<double>(best_r) * w};
}

std::pair<float, std::int32_t> qparams_from_range(double min, double max, Scheme scheme) {
  if (scheme == Scheme::symmetric) {
    double a = std::max(std::abs(min), std::abs(max));
    if (min == max || a == 0.0) a = std::max(std::abs(min), 1.0);
    return {static_cast<float>(a / 127.0), 0};
  }
  if (min == max) {
    min -= 0.5;
    max += 0.5;
  }
  min = std::min(min, 0.0);
  max = std::max(max, 0.0);
  double scale = (max - min) / 255.0;
  float s = static_cast<float>(scale);
  double zp = round_half_even(-128.0 - min / static_cast<double>(s));
  zp = std::clamp(zp, -128.0, 127.0);
  return {s, static_cast<std::int32_t>(zp)};
}

QParams compute_qparams(const Observer& obs, Scheme scheme) {
  if (obs.empty()) throw ConfigError("compute_qparams: observer has seen no data");
  QParams qp;
  qp.scheme = scheme;
  qp.granularity = obs.granularity();
  if (obs.kind() == ObserverKind::histogram) {
    if (obs.granularity().per_channel) throw ConfigError("compute_qparams: histogram observer is per-tensor only");
    const Histogram& h = obs.hist();
    double lo = h.min, hi = h.max;
    if (h.min != h.max) {
      // Candidate edges can overhang the data by up to one bin.
      std::tie(lo, hi) = histogram_best_range(h);
      lo = std::max(lo, h.min);
      hi = std::min(hi, h.max);
    }
    auto [s, zp] = qparams_from_range(lo, hi, scheme);
    qp.scales = {s};
    qp.zero_points = {zp};
    return qp;
  }
  for (std::size_t k = 0; k < obs.slices(); ++k) {
    auto [s, zp] = qparams_from_range(obs.min(k), obs.max(k), scheme);
    qp.scales.push_back(s);
    qp.zero_points.push_back(zp);
  }
  return qp;
}

}  // namespace sqv::quant
