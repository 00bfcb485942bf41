#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "helpers.hpp"
#include "oracles.hpp"
#include "quant_oracles.hpp"
#include "sqv/codec/model.hpp"
#include "sqv/codec/sequence.hpp"
#include "sqv/quant/calibrate.hpp"
#include "sqv/quant/config.hpp"
#include "sqv/quant/observer.hpp"
#include "sqv/quant/qconv.hpp"
#include "sqv/quant/qparams.hpp"
#include "sqv/quant/quantized_decoder.hpp"
#include "sqv/quant/requant.hpp"
#include "sqv/search/clips.hpp"

using namespace sqv;
using namespace sqv::quant;
using sqvtest::random_tensor;

namespace {

Tensor row(std::vector<float> v) {
  const std::size_t n = v.size();
  return Tensor({1, 1, 1, n}, std::move(v));
}

// Independent restatement of the objective on bin centres, with levels
// enumerated explicitly instead of rounded to.
double range_error_oracle(const Histogram& h, std::size_t l, std::size_t r) {
  const double bw = (h.hi - h.lo) / static_cast<double>(h.counts.size());
  const double lo = h.lo + bw * static_cast<double>(l), hi = h.lo + bw * static_cast<double>(r);
  const double step = (hi - lo) / 255.0;
  double e = 0.0;
  for (std::size_t b = 0; b < h.counts.size(); ++b) {
    if (h.counts[b] == 0) continue;
    const double c = h.lo + bw * (static_cast<double>(b) + 0.5);
    double best = std::numeric_limits<double>::infinity();
    if (c <= lo) {
      best = (c - lo) * (c - lo);
    } else if (c >= hi) {
      best = (c - hi) * (c - hi);
    } else {
      const auto k = static_cast<long>((c - lo) / step);
      for (long j = std::max(0L, k - 1); j <= std::min(255L, k + 2); ++j) {
        const double d = c - (lo + static_cast<double>(j) * step);
        best = std::min(best, d * d);
      }
    }
    e += static_cast<double>(h.counts[b]) * best;
  }
  return e;
}

struct Choice {
  std::size_t l, r;
};

Choice best_range_oracle(const Histogram& h) {
  std::size_t first = h.counts.size(), last = 0;
  for (std::size_t b = 0; b < h.counts.size(); ++b) {
    if (h.counts[b]) {
      first = std::min(first, b);
      last = b;
    }
  }
  const std::size_t span = last + 1 - first;
  std::vector<std::size_t> ls, rs;
  for (std::size_t i = 0; i < kBestRangeGrid; ++i) {
    ls.push_back(first + i * span / kBestRangeGrid);
    rs.push_back(last + 1 - i * span / kBestRangeGrid);
  }
  Choice best{first, last + 1};
  double be = std::numeric_limits<double>::infinity();
  for (std::size_t l : ls)
    for (std::size_t r : rs) {
      if (l >= r) continue;
      const double e = range_error_oracle(h, l, r);
      // Relative slack: the two error sums are evaluated differently.
      const bool tie = std::isfinite(be) && std::abs(e - be) <= 1e-9 * std::max(1.0, be);
      if ((!tie && e < be) || (tie && (r - l < best.r - best.l || (r - l == best.r - best.l && l < best.l)))) {
        be = std::min(be, e);
        best = {l, r};
      }
    }
  return best;
}

Histogram make_hist(std::vector<std::uint64_t> counts, double lo, double hi) {
  Histogram h;
  h.counts = std::move(counts);
  h.lo = lo;
  h.hi = hi;
  h.min = lo;
  h.max = hi;
  return h;
}

std::pair<std::size_t, std::size_t> edges_of(const Histogram& h, std::pair<double, double> r) {
  const double bw = h.bin_width();
  return {static_cast<std::size_t>(std::llround((r.first - h.lo) / bw)),
          static_cast<std::size_t>(std::llround((r.second - h.lo) / bw))};
}

}  // namespace

// ---------------------------------------------------------------- observers

TEST_CASE("minmax observer") {
  auto o = Observer::min_max();
  o.observe(row({-1, 2}));
  o.observe(row({0, 3}));
  CHECK(o.min() == -1.0);
  CHECK(o.max() == 3.0);
}

TEST_CASE("moving-average observer") {
  auto o = Observer::moving_average_min_max(0.01);
  o.observe(row({-1, 1}));
  o.observe(row({-3, 2}));
  CHECK(o.min() == doctest::Approx(-1.02).epsilon(1e-12));
  CHECK(o.max() == doctest::Approx(1.01).epsilon(1e-12));
  CHECK_THROWS_AS(Observer::moving_average_min_max(0.0), ConfigError);
  CHECK_THROWS_AS(Observer::moving_average_min_max(1.5), ConfigError);
}

TEST_CASE("moving-average bounds stay within the hull of batch bounds") {
  Rng r(4);
  auto o = Observer::moving_average_min_max(0.3);
  double lo = 1e9, hi = -1e9, blo = 1e9, bhi = -1e9;
  for (int k = 0; k < 50; ++k) {
    std::vector<float> v(10);
    for (auto& x : v) x = static_cast<float>(r.symmetric() * (1 + k % 7));
    o.observe(row(v));
    const auto [mn, mx] = std::minmax_element(v.begin(), v.end());
    lo = std::min(lo, static_cast<double>(*mn));
    blo = std::max(blo == 1e9 ? -1e9 : blo, static_cast<double>(*mn));
    hi = std::max(hi, static_cast<double>(*mx));
    bhi = std::min(bhi == -1e9 ? 1e9 : bhi, static_cast<double>(*mx));
    CHECK(o.min() >= lo);
    CHECK(o.min() <= blo);
    CHECK(o.max() <= hi);
    CHECK(o.max() >= bhi);
    CHECK(o.min() <= o.max());
  }
}

TEST_CASE("per-channel minmax keeps one pair per slice") {
  const Tensor w({2, 1, 1, 2}, std::vector<float>{-1, 2, 5, 7});
  auto o = Observer::min_max(Granularity::per_channel_axis(0));
  o.observe(w);
  REQUIRE(o.slices() == 2);
  CHECK(o.min(0) == -1.0);
  CHECK(o.max(0) == 2.0);
  CHECK(o.min(1) == 5.0);
  CHECK(o.max(1) == 7.0);
  const Tensor wt({1, 2, 1, 2}, std::vector<float>{-1, 2, 5, 7});
  auto ot = Observer::min_max(Granularity::per_channel_axis(1));
  ot.observe(wt);
  CHECK(ot.max(1) == 7.0);
}

TEST_CASE("histogram observer conserves counts across rebinning") {
  Rng r(6);
  auto o = Observer::histogram();
  std::vector<float> v(10000);
  for (auto& x : v) x = static_cast<float>(r.normal());
  o.observe(row(v));
  CHECK(o.hist().total() == 10000);
  CHECK(o.hist().counts.size() == 2048);

  o.observe(row({-40.0f, 25.0f, 0.5f}));
  const Histogram& h = o.hist();
  CHECK(h.total() == 10003);
  CHECK(h.lo <= -40.0);
  CHECK(h.hi >= 25.0);
  CHECK(h.min == -40.0);
  CHECK(h.max == 25.0);
  CHECK(h.lo < h.hi);
}

// ------------------------------------------------------------- qparams

TEST_CASE("compute_qparams examples") {
  auto mm = Observer::min_max();
  mm.observe(row({-1, 3}));
  const QParams s = compute_qparams(mm, Scheme::symmetric);
  CHECK(s.scales[0] == static_cast<float>(3.0 / 127.0));
  CHECK(s.zero_points[0] == 0);

  auto mm2 = Observer::min_max();
  mm2.observe(row({0.0f, 2.55f}));
  const QParams a = compute_qparams(mm2, Scheme::affine);
  CHECK(a.scales[0] == doctest::Approx(0.01).epsilon(1e-6));
  CHECK(a.zero_points[0] == -128);

  auto z = Observer::min_max();
  z.observe(row({0, 0, 0}));
  const QParams d = compute_qparams(z, Scheme::symmetric);
  CHECK(d.scales[0] == static_cast<float>(1.0 / 127.0));
  CHECK(d.zero_points[0] == 0);

  // Constant 3: symmetric uses max(|v|, 1) / 127; affine spans v +- 0.5 and 0.
  auto c = Observer::min_max();
  c.observe(row({3, 3}));
  CHECK(compute_qparams(c, Scheme::symmetric).scales[0] == static_cast<float>(3.0 / 127.0));
  const QParams ca = compute_qparams(c, Scheme::affine);
  CHECK(ca.scales[0] == static_cast<float>(3.5 / 255.0));

  CHECK_THROWS_AS(compute_qparams(Observer::min_max(), Scheme::symmetric), ConfigError);
}

TEST_CASE("qparams invariants over seeded ranges") {
  Rng r(8);
  for (int t = 0; t < 2000; ++t) {
    double a = r.symmetric() * std::pow(10.0, r.symmetric() * 3), b = r.symmetric() * std::pow(10.0, r.symmetric() * 3);
    if (a > b) std::swap(a, b);
    for (Scheme sc : {Scheme::symmetric, Scheme::affine}) {
      const auto [s, zp] = qparams_from_range(a, b, sc);
      CHECK(s > 0.0f);
      if (sc == Scheme::symmetric) {
        CHECK(zp == 0);
      } else {
        CHECK(zp >= -128);
        CHECK(zp <= 127);
        CHECK(dequantize_value(quantize_value(0.0f, s, zp, -128, 127), s, zp) == 0.0f);
      }
    }
  }
}

TEST_CASE("quantize examples") {
  CHECK(quantize_value(1.27f, 0.1f, 0, -127, 127) == 13);
  CHECK(quantize_value(0.0f, 0.1f, -5, -128, 127) == -5);
  CHECK(quantize_value(1000.0f, 0.1f, 0, -127, 127) == 127);
  CHECK(quantize_value(-1000.0f, 0.1f, 0, -127, 127) == -127);
  CHECK(quantize_value(-1000.0f, 0.1f, 0, -128, 127) == -128);
  // Ties to even.
  CHECK(quantize_value(0.25f, 0.5f, 0, -127, 127) == 0);
  CHECK(quantize_value(0.75f, 0.5f, 0, -127, 127) == 2);
  CHECK(round_half_even(2.5) == 2.0);
  CHECK(round_half_even(-2.5) == -2.0);
  CHECK(round_half_even(3.5) == 4.0);
}

TEST_CASE("quantize round-trip error is at most half a step") {
  Rng r(9);
  for (int t = 0; t < 1'000'000; ++t) {
    const bool sym = (t & 1) != 0;
    const float s = static_cast<float>(std::pow(10.0, r.symmetric() * 3));
    const int zp = sym ? 0 : static_cast<int>(r.below(256)) - 128;
    const int qmin = sym ? -127 : -128;
    const double lo = (qmin - zp) * static_cast<double>(s), hi = (127 - zp) * static_cast<double>(s);
    const auto x = static_cast<float>(lo + (hi - lo) * r.uniform());
    const float back = dequantize_value(quantize_value(x, s, zp, qmin, 127), s, zp);
    // x / s and (q - zp) * s are each one f32 rounding away from exact.
    REQUIRE(std::abs(static_cast<double>(back) - x) <= s * 0.5 + std::abs(x) * 0x1.0p-22);
  }
}

TEST_CASE("per-channel tensors quantize by their own slice") {
  QParams qp{Scheme::symmetric, Granularity::per_channel_axis(0), {0.5f, 2.0f}, {0, 0}};
  const Tensor t({2, 1, 1, 2}, std::vector<float>{1, 2, 1, 2});
  const TensorI8 q = quantize(t, qp);
  CHECK(q.values() == std::vector<std::int8_t>{2, 4, 0, 1});
  CHECK(dequantize(q, qp).values() == std::vector<float>{1, 2, 0, 2});
  QParams bad{Scheme::symmetric, Granularity::per_channel_axis(0), {1.0f, 1.0f, 1.0f}, {0, 0, 0}};
  CHECK_THROWS_AS(quantize(t, bad), ShapeError);
}

TEST_CASE("per-channel weight error never exceeds per-tensor error") {
  for (int t = 0; t < 20; ++t) {
    Rng r(100 + t);
    const std::size_t cout = 4 + t % 5;
    Tensor w({cout, 3, 3, 3});
    for (std::size_t o = 0; o < cout; ++o) {
      // Channel magnitudes spread over two decades.
      const double mag = std::pow(10.0, r.symmetric());
      for (std::size_t i = 0; i < 27; ++i) w.data()[o * 27 + i] = static_cast<float>(r.symmetric() * mag);
    }
    for (Scheme sc : {Scheme::symmetric, Scheme::affine}) {
      auto pt = Observer::min_max();
      auto pc = Observer::min_max(Granularity::per_channel_axis(0));
      pt.observe(w);
      pc.observe(w);
      const QParams qt = compute_qparams(pt, sc), qc = compute_qparams(pc, sc);
      const Tensor dt = dequantize(quantize(w, qt), qt), dc = dequantize(quantize(w, qc), qc);
      double et = 0, ec = 0;
      for (std::size_t i = 0; i < w.numel(); ++i) {
        et += std::pow(dt.data()[i] - w.data()[i], 2);
        ec += std::pow(dc.data()[i] - w.data()[i], 2);
      }
      CHECK(ec <= et);
    }
  }
}

// ---------------------------------------------------------- best range

TEST_CASE("best range: a single spike collapses to its bin") {
  std::vector<std::uint64_t> c(64, 0);
  c[17] = 500;
  const Histogram h = make_hist(c, 0.0, 64.0);
  const auto r = histogram_best_range(h);
  CHECK(r.first == 17.0);
  CHECK(r.second == 18.0);
}

TEST_CASE("best range agrees with the exhaustive oracle on coarse histograms") {
  // 64 bins: the candidate grid is every bin edge.
  SUBCASE("uniform counts keep the full range") {
    const Histogram h = make_hist(std::vector<std::uint64_t>(64, 100), -3.0, 5.0);
    const auto o = best_range_oracle(h);
    const auto e = edges_of(h, histogram_best_range(h));
    CHECK(e.first == o.l);
    CHECK(e.second == o.r);
    CHECK(o.l == 0);
    CHECK(o.r == 64);
  }
  SUBCASE("outliers are excluded") {
    Rng r(12);
    std::vector<std::uint64_t> c(64, 0);
    for (int i = 0; i < 20000; ++i) {
      const double v = 32 + 4 * r.normal();
      c[static_cast<std::size_t>(std::clamp(v, 0.0, 63.0))]++;
    }
    c[0] = 1;
    c[63] = 1;
    const Histogram h = make_hist(c, 0.0, 64.0);
    const auto o = best_range_oracle(h);
    const auto e = edges_of(h, histogram_best_range(h));
    CHECK(e.first == o.l);
    CHECK(e.second == o.r);
    CHECK(o.l > 0);
    CHECK(o.r < 64);
  }
  SUBCASE("seeded random shapes") {
    for (int t = 0; t < 30; ++t) {
      Rng r(300 + t);
      std::vector<std::uint64_t> c(64, 0);
      const std::size_t a = r.below(20), b = 44 + r.below(20);
      for (std::size_t i = a; i <= b; ++i) c[i] = r.below(4) == 0 ? 0 : r.below(1000);
      c[a] = 1 + r.below(5);
      c[b] = 1 + r.below(5);
      const Histogram h = make_hist(c, -1.0, 1.0);
      const auto o = best_range_oracle(h);
      const auto e = edges_of(h, histogram_best_range(h));
      CHECK(e.first == o.l);
      CHECK(e.second == o.r);
      CHECK(histogram_range_error(h, o.l, o.r) == doctest::Approx(range_error_oracle(h, o.l, o.r)));
    }
  }
}

TEST_CASE("best range on a full 2048-bin histogram matches the 64x64 oracle") {
  Rng r(13);
  auto o = Observer::histogram();
  std::vector<float> v(20000);
  for (auto& x : v) x = static_cast<float>(r.normal());
  v[0] = 30.0f;
  v[1] = -25.0f;
  o.observe(row(v));
  const Histogram& h = o.hist();
  const auto want = best_range_oracle(h);
  const auto got = edges_of(h, histogram_best_range(h));
  CHECK(got.first == want.l);
  CHECK(got.second == want.r);
  const double bw = h.bin_width();
  CHECK(h.lo + bw * static_cast<double>(want.l) > -25.0);
  CHECK(h.lo + bw * static_cast<double>(want.r) < 30.0);
}

TEST_CASE("histogram qparams are narrower than minmax on outlier data") {
  Rng r(14);
  std::vector<float> v(5000);
  for (auto& x : v) x = static_cast<float>(r.normal());
  v[7] = 80.0f;
  auto h = Observer::histogram();
  auto m = Observer::min_max();
  h.observe(row(v));
  m.observe(row(v));
  CHECK(compute_qparams(h, Scheme::symmetric).scales[0] < compute_qparams(m, Scheme::symmetric).scales[0]);
  CHECK_THROWS_AS(histogram_best_range(Histogram{}), ConfigError);
}

// ------------------------------------------------------------- requant

TEST_CASE("requant examples") {
  const Requant r = requant_from_ratio(0.025);
  CHECK(apply_requant(200, r, 0) == 5);
  CHECK(apply_requant(100, r, 0) == 2);  // 2.5 ties to even
  CHECK(apply_requant(-100, r, 0) == -2);
  CHECK(apply_requant(100000, r, 3) == 127);
  // 0.025 is not dyadic, so true ties need a ratio the multiplier holds exactly.
  const Requant quarter = requant_from_ratio(0.25);
  CHECK(quarter.value() == 0.25);
  CHECK(apply_requant(10, quarter, 0) == 2);   // 2.5
  CHECK(apply_requant(14, quarter, 0) == 4);   // 3.5
  CHECK(apply_requant(-10, quarter, 0) == -2);
  CHECK(apply_requant(-14, quarter, 0) == -4);
  CHECK(apply_requant(6, quarter, 0) == 2);    // 1.5
  CHECK(r.multiplier >= (1 << 30));
  CHECK(std::abs(r.value() / 0.025 - 1.0) <= std::ldexp(1.0, -30));
  CHECK_THROWS_AS(requant_from_ratio(0.0), RangeError);
  CHECK_THROWS_AS(requant_from_ratio(1e12), RangeError);
  CHECK_THROWS_AS(requant_multiplier(-1.0, 1.0, 1.0), RangeError);
}

TEST_CASE("requant matches the f64 rounding oracle") {
  Rng r(15);
  int off = 0, worse = 0;
  const int n = 10000;
  for (int t = 0; t < n; ++t) {
    const double ratio = std::pow(10.0, -4.0 + 4.0 * r.uniform());
    const auto acc = static_cast<std::int32_t>(static_cast<std::int64_t>(r.below(1 << 22)) - (1 << 21));
    const std::int32_t got = requant_scale(acc, requant_from_ratio(ratio));
    const double want = std::nearbyint(static_cast<double>(acc) * ratio);
    if (got != want) {
      ++off;
      if (std::abs(got - want) > 1) ++worse;
    }
  }
  CHECK(worse == 0);
  CHECK(off <= n / 10000);
}

TEST_CASE("requant is exact against its own multiplier") {
  // With the dyadic value of the multiplier the only rounding is the final
  // one, so the integer path must agree everywhere (long double is exact here).
  Rng r(16);
  for (int t = 0; t < 10000; ++t) {
    const Requant q = requant_from_ratio(std::pow(10.0, -5.0 + 5.0 * r.uniform()));
    const auto acc = static_cast<std::int32_t>(static_cast<std::int64_t>(r.below(1u << 31)) - (1 << 30));
    const long double x = static_cast<long double>(acc) * q.multiplier;
    const long double want = std::nearbyintl(std::ldexp(x, -31 - q.shift));
    REQUIRE(requant_scale(acc, q) == static_cast<std::int32_t>(want));
  }
}

// --------------------------------------------------------------- qconv

TEST_CASE("qconv forced examples") {
  const TensorI8 a({1, 1, 1, 1}, std::int8_t{10});
  const TensorI8 w({1, 1, 1, 1}, std::int8_t{20});
  const std::vector<std::int32_t> bias = {0};
  const auto aq = QParams::per_tensor(Scheme::symmetric, 0.1f);
  const auto wq = QParams::per_tensor(Scheme::symmetric, 0.05f);
  const auto oq = QParams::per_tensor(Scheme::symmetric, 0.2f);
  CHECK(qconv2d(a, w, bias, aq, wq, oq, {}).values()[0] == 5);

  const TensorI8 zeros({1, 2, 4, 4}, std::int8_t{-3});
  const TensorI8 w3({3, 2, 3, 3}, std::int8_t{17});
  const auto aq2 = QParams::per_tensor(Scheme::affine, 0.1f, -3);
  const auto oq2 = QParams::per_tensor(Scheme::affine, 0.3f, 11);
  const TensorI8 y = qconv2d(zeros, w3, std::vector<std::int32_t>(3, 0), aq2, wq, oq2, {1, 1, false});
  for (auto v : y.values()) CHECK(v == 11);
  const TensorI8 wt({2, 3, 4, 4}, std::int8_t{-9});
  const TensorI8 yt =
      qconv_transpose2d(zeros, wt, std::vector<std::int32_t>(3, 0), aq2, wq, oq2, {2, 1, true});
  CHECK(yt.shape() == Shape{1, 3, 8, 8});
  for (auto v : yt.values()) CHECK(v == 11);
}

TEST_CASE("qconv detects accumulator overflow from the layer bound") {
  const auto q = QParams::per_tensor(Scheme::affine, 1.0f, 0);
  // 256 * 23 * 23 taps * 128 * 128 > 2^31
  const TensorI8 a({1, 256, 2, 2}, std::int8_t{1});
  CHECK_THROWS_AS(qconv2d(a, TensorI8({1, 256, 23, 23}), std::vector<std::int32_t>{0}, q, q, q, {1, 11, false}),
                  RangeError);
  // 256 * 21 * 21 * 128 * 128 < 2^31 runs
  CHECK_NOTHROW(qconv2d(a, TensorI8({1, 256, 21, 21}), std::vector<std::int32_t>{0}, q, q, q, {1, 10, false}));
}

TEST_CASE("qconv matches the dequantize-float-quantize oracle on 1000 layers") {
  Rng pick(17);
  int max_diff = 0;
  for (int t = 0; t < 1000; ++t) max_diff = std::max(max_diff, sqvtest::qconv_trial(t, pick));
  CHECK(max_diff <= 1);
}

TEST_CASE("qconv rejects inconsistent parameters") {
  const TensorI8 a({1, 2, 3, 3});
  const TensorI8 w({3, 2, 3, 3});
  const auto q = QParams::per_tensor(Scheme::symmetric, 0.1f);
  CHECK_THROWS_AS(qconv2d(a, w, std::vector<std::int32_t>(2, 0), q, q, q, {1, 1, false}), ShapeError);
  const QParams pc{Scheme::symmetric, Granularity::per_channel_axis(0), {0.1f, 0.1f}, {0, 0}};
  CHECK_THROWS_AS(qconv2d(a, w, std::vector<std::int32_t>(3, 0), q, pc, q, {1, 1, false}), ShapeError);
  CHECK_THROWS_AS(qconv2d(TensorI8({1, 3, 3, 3}), w, std::vector<std::int32_t>(3, 0), q, q, q, {1, 1, false}),
                  ShapeError);
}

// ------------------------------------------------------------- configs

TEST_CASE("validate_config rules") {
  QConfig table1;  // histogram/pts activations, histogram/pta weights
  table1.weight_scheme = QScheme::per_tensor_affine;
  CHECK(validate_config(table1).ok);

  for (auto ob : {ObserverKind::min_max, ObserverKind::moving_average_min_max, ObserverKind::histogram}) {
    for (auto ws : {QScheme::per_channel_symmetric, QScheme::per_channel_affine}) {
      QConfig c;
      c.weight_observer = ob;
      c.weight_scheme = ws;
      const Validation v = validate_config(c);
      CHECK_FALSE(v.ok);
      CHECK(v.reason.find(kReasonDeconv) != std::string::npos);
      CHECK((v.reason.find(kReasonHistogram) != std::string::npos) == (ob == ObserverKind::histogram));
      // Without transposed convolutions only the histogram rule remains.
      CHECK(validate_config(c, false).ok == (ob != ObserverKind::histogram));
    }
  }
  QConfig act;
  act.act_scheme = QScheme::per_channel_affine;
  const Validation va = validate_config(act);
  CHECK_FALSE(va.ok);
  CHECK(va.reason.find(kReasonActChannel) != std::string::npos);
  // Deterministic, ordered reasons.
  QConfig all;
  all.act_scheme = QScheme::per_channel_symmetric;
  all.weight_scheme = QScheme::per_channel_symmetric;
  CHECK(validate_config(all).reason == std::string(kReasonDeconv) + "; " + std::string(kReasonHistogram) + "; " +
                                           std::string(kReasonActChannel));
}

TEST_CASE("scheme and observer names round trip") {
  for (auto s : {QScheme::per_tensor_symmetric, QScheme::per_tensor_affine, QScheme::per_channel_symmetric,
                 QScheme::per_channel_affine}) {
    CHECK(parse_scheme(scheme_name(s)) == s);
  }
  for (auto o : {ObserverKind::min_max, ObserverKind::moving_average_min_max, ObserverKind::histogram}) {
    CHECK(parse_observer(observer_name(o)) == o);
  }
  CHECK_THROWS_AS(parse_scheme("xyz"), ConfigError);
  CHECK_THROWS_AS(parse_observer("xyz"), ConfigError);
}

// --------------------------------------------------------- calibration

namespace {

std::vector<search::Clip> small_clips(int n, std::uint64_t seed0, int size = 32, int frames = 3) {
  std::vector<search::Clip> clips;
  for (int i = 0; i < n; ++i) {
    search::ClipSpec s;
    s.kind = search::MotionKind::noise;
    s.seed = seed0 + static_cast<std::uint64_t>(i);
    s.width = s.height = size;
    s.frames = frames;
    clips.push_back(search::gen_synthetic_clip(s));
  }
  return clips;
}

const int kCalQualities[] = {5, 9};

}  // namespace

TEST_CASE("calibration is deterministic and the blob round-trips") {
  const codec::Model m = codec::Model::create(42);
  const auto clips = small_clips(2, 500);
  QConfig qc = enumerate_configs()[1];
  const auto a = calibrate_and_convert(m, clips, qc, FloatEngine::reference(), kCalQualities);
  const auto b = calibrate_and_convert(m, clips, qc, FloatEngine::reference(), kCalQualities);
  CHECK(a.intra.serialize() == b.intra.serialize());
  CHECK(a.residual.serialize() == b.residual.serialize());
  CHECK(QuantizedHyperDecoder::parse(a.intra.serialize()) == a.intra);

  qc.weight_scheme = QScheme::per_channel_symmetric;
  CHECK_THROWS_AS(calibrate_and_convert(m, clips, qc, FloatEngine::reference(), kCalQualities), ConfigError);
  CHECK_THROWS_AS(calibrate_and_convert(m, {}, enumerate_configs()[1], FloatEngine::reference()), ConfigError);
}

TEST_CASE("minmax bounds grow with more calibration clips") {
  const codec::Model m = codec::Model::create(42);
  const auto eight = small_clips(8, 600);
  const std::vector<search::Clip> one(eight.begin(), eight.begin() + 1);
  const auto d1 = collect_calibration(m, one, FloatEngine::reference(), kCalQualities);
  const auto d8 = collect_calibration(m, eight, FloatEngine::reference(), kCalQualities);
  for (std::size_t p = 0; p < 2; ++p) {
    auto o1 = Observer::min_max(), o8 = Observer::min_max();
    for (const auto& a : d1.activations[p]) o1.observe(a.out);
    for (const auto& a : d8.activations[p]) o8.observe(a.out);
    CHECK(o8.min() <= o1.min());
    CHECK(o8.max() >= o1.max());
  }
  QConfig qc = enumerate_configs()[25];  // minmax/pts + histogram/pta
  REQUIRE(qc.act_observer == ObserverKind::min_max);
  const auto q1 = convert(m, d1, qc), q8 = convert(m, d8, qc);
  for (std::size_t i = 0; i < q1.intra.layers.size(); ++i) {
    CHECK(q8.intra.layers[i].act.scales[0] >= q1.intra.layers[i].act.scales[0]);
  }
  CHECK(q8.intra.output.scales[0] >= q1.intra.output.scales[0]);
}

TEST_CASE("histogram activation scales are smaller than minmax on outlier-laden clips") {
  const codec::Model m = codec::Model::create(42);
  auto clips = small_clips(3, 700);
  // Salt-and-pepper impulses push the extremes of every activation.
  Rng r(18);
  for (auto& clip : clips)
    for (auto& f : clip)
      for (int i = 0; i < 12; ++i) f.samples[r.below(f.samples.size())] = (i & 1) ? 255 : 0;
  const auto d = collect_calibration(m, clips, FloatEngine::reference(), kCalQualities);
  QConfig mm = enumerate_configs()[25], hh = enumerate_configs()[1];
  REQUIRE(mm.act_observer == ObserverKind::min_max);
  REQUIRE(hh.act_observer == ObserverKind::histogram);
  REQUIRE(mm.act_scheme == hh.act_scheme);
  const auto qm = convert(m, d, mm), qh = convert(m, d, hh);
  bool strictly = false;
  for (std::size_t i = 0; i < qm.intra.layers.size(); ++i) {
    CHECK(qh.intra.layers[i].act.scales[0] <= qm.intra.layers[i].act.scales[0]);
    strictly |= qh.intra.layers[i].act.scales[0] < qm.intra.layers[i].act.scales[0];
  }
  CHECK(qh.intra.output.scales[0] <= qm.intra.output.scales[0]);
  strictly |= qh.intra.output.scales[0] < qm.intra.output.scales[0];
  CHECK(strictly);
}

TEST_CASE("quantized hyper decoder is engine independent and repeatable") {
  codec::Model m = codec::Model::create(42);
  const auto clips = small_clips(2, 800);
  m.set_quantized(calibrate_and_convert(m, clips, enumerate_configs()[1], FloatEngine::reference(), kCalQualities));
  const TensorI32 z({1, 8, 2, 2}, std::vector<std::int32_t>{0, 3, 9, 12, 5, 5, 1, 0, 7, 8, 20, 2, 3, 3, 3, 3,
                                                              0,  1, 2, 3,  4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15});
  const auto ref = codec::hyper_decode(m, codec::SubPath::intra, z, codec::HpMode::quantized, FloatEngine::reference());
  for (int i = 0; i < 100; ++i) {
    const FloatEngine e = i % 2 ? FloatEngine::ulp(static_cast<std::uint64_t>(i)) : FloatEngine::reassoc();
    REQUIRE(codec::hyper_decode(m, codec::SubPath::intra, z, codec::HpMode::quantized, e) == ref);
  }
  // The raw-to-index table is monotone and recomputes clamp(exp(raw)).
  const auto& dec = m.quantized_decoder(codec::SubPath::intra);
  for (int q = -128; q < 127; ++q) CHECK(dec.sigma_map[q + 128] <= dec.sigma_map[q + 129]);
  for (int q = -128; q <= 127; ++q) {
    const float raw = dequantize_value(static_cast<std::int8_t>(q), dec.output.scales[0], dec.output.zero_points[0]);
    CHECK(dec.sigma_map[q + 128] == dec.lut.raw_to_index(raw));
  }
}
