#include "sqv/entropy/freq_table.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <string>

#include "sqv/common/error.hpp"

namespace sqv::entropy {

FreqRow FreqRow::from_frequencies(std::vector<std::uint16_t> freq) {
  if (freq.size() < 3 || freq.size() % 2 == 0) {
    throw FormatError("frequency row needs 2W+3 entries, got " + std::to_string(freq.size()));
  }
  FreqRow row;
  row.window_ = static_cast<int>((freq.size() - 3) / 2);
  row.cum_.resize(freq.size() + 1);
  row.cum_[0] = 0;
  for (std::size_t i = 0; i < freq.size(); ++i) {
    if (freq[i] == 0) throw FormatError("frequency row has a zero entry at slot " + std::to_string(i));
    row.cum_[i + 1] = row.cum_[i] + freq[i];
  }
  if (row.cum_.back() != kTotal) {
    throw FormatError("frequency row totals " + std::to_string(row.cum_.back()) + ", expected 65536");
  }
  row.freq_ = std::move(freq);
  return row;
}

FreqRow FreqRow::from_probabilities(std::span<const double> probs, bool mirrored) {
  return from_frequencies(quantize_frequencies(probs, mirrored));
}

std::size_t FreqRow::slot_of(int value) const {
  if (value < -window_) return low_escape();
  if (value > window_) return high_escape();
  return static_cast<std::size_t>(value + window_ + 1);
}

std::size_t FreqRow::find(std::uint32_t target) const {
  auto it = std::upper_bound(cum_.begin() + 1, cum_.end(), target);
  return static_cast<std::size_t>(it - cum_.begin()) - 1;
}

std::vector<std::uint16_t> quantize_frequencies(std::span<const double> probs, bool mirrored) {
  const std::size_t n = probs.size();
  if (n == 0 || n > kTotal) throw ConfigError("quantize_frequencies: bad slot count");
  if (mirrored && n % 2 == 0) throw ConfigError("quantize_frequencies: mirrored rows need an odd slot count");
  double sum = 0.0;
  for (double p : probs) sum += std::max(p, 0.0);
  if (!(sum > 0.0)) throw ConfigError("quantize_frequencies: probabilities sum to zero");

  std::vector<double> rem(n);
  std::vector<std::int64_t> f(n);
  std::int64_t used = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = std::max(probs[i], 0.0) / sum * static_cast<double>(kTotal);
    const double fl = std::floor(t);
    f[i] = std::max<std::int64_t>(1, static_cast<std::int64_t>(fl));
    rem[i] = t - fl;
    used += f[i];
  }

  // Units of redistribution. A mirrored row moves slot pairs (i, n-1-i)
  // together so it stays symmetric; only the centre slot moves alone.
  struct Group {
    std::size_t a, b;
    std::int64_t weight;
  };
  std::vector<Group> groups;
  if (mirrored) {
    for (std::size_t i = 0; i < n / 2; ++i) groups.push_back({i, n - 1 - i, 2});
    groups.push_back({n / 2, n / 2, 1});
  } else {
    for (std::size_t i = 0; i < n; ++i) groups.push_back({i, i, 1});
  }
  auto move = [&](const Group& g, std::int64_t d) {
    if (f[g.a] + d < 1 || f[g.a] + d > 0xFFFF || f[g.b] + d < 1 || f[g.b] + d > 0xFFFF) return false;
    f[g.a] += d;
    if (g.b != g.a) f[g.b] += d;
    return true;
  };

  std::int64_t diff = static_cast<std::int64_t>(kTotal) - used;
  if (diff != 0) {
    const std::int64_t dir = diff > 0 ? 1 : -1;
    std::stable_sort(groups.begin(), groups.end(), [&](const Group& x, const Group& y) {
      return dir > 0 ? rem[x.a] > rem[y.a] : rem[x.a] < rem[y.a];
    });
    bool progress = false;
    for (std::size_t k = 0; diff != 0; k = (k + 1) % groups.size()) {
      const Group& g = groups[k];
      if (g.weight <= diff * dir && move(g, dir)) {
        diff -= dir * g.weight;
        progress = true;
      }
      if (k + 1 < groups.size()) continue;
      if (!progress) {
        // Odd leftover with the centre pinned: push the centre the other
        // way so a pair can absorb an even amount.
        const Group centre{n / 2, n / 2, 1};
        if (!mirrored || diff * dir != 1 || !move(centre, -dir)) {
          throw ConfigError("quantize_frequencies: cannot reach the target total");
        }
        diff += dir;
      }
      progress = false;
    }
  }
  std::vector<std::uint16_t> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<std::uint16_t>(f[i]);
  return out;
}

double erf_poly(double x) {
  const bool neg = x < 0.0;
  const double a = neg ? -x : x;
  const double p = 1.0 + a * (0.0705230784 + a * (0.0422820123 + a * (0.0092705272 +
                   a * (0.0001520143 + a * (0.0002765672 + a * 0.0000430638)))));
  double p2 = p * p;    // ^2
  double p4 = p2 * p2;  // ^4
  double p8 = p4 * p4;
  double p16 = p8 * p8;
  const double r = 1.0 - 1.0 / p16;
  return neg ? -r : r;
}

double normal_cdf(double x) { return 0.5 * (1.0 + erf_poly(x * 0.70710678118654752440)); }

FreqRow gaussian_row(double sigma, double mean, int window) {
  if (!(sigma > 0.0)) throw ConfigError("gaussian_row: sigma must be positive");
  if (window < 1) throw ConfigError("gaussian_row: window must be >= 1");
  const std::size_t n = static_cast<std::size_t>(2 * window + 3);
  std::vector<double> p(n);
  auto cdf = [&](double edge) { return normal_cdf((edge - mean) / sigma); };
  const bool centred = mean == 0.0;
  p[0] = cdf(-window - 0.5);
  for (int k = -window; k <= window; ++k) {
    // A centred row is evaluated on k >= 0 and mirrored, so it is exactly
    // symmetric in floating point too.
    const int a = centred ? std::abs(k) : k;
    p[static_cast<std::size_t>(k + window + 1)] = cdf(a + 0.5) - cdf(a - 0.5);
  }
  p[n - 1] = centred ? p[0] : 1.0 - cdf(window + 0.5);
  return FreqRow::from_probabilities(p, centred);
}

}  // namespace sqv::entropy
