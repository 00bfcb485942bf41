#include "sqv/eval/trace.hpp"

#include <cmath>
#include <cstdio>
#include <span>

namespace sqv::eval {

namespace {

template <class A, class B>
void diff(std::span<const A> a, std::span<const B> b, TraceRecord& r) {
  if (a.size() != b.size()) {
    r.equal = false;
    r.first_div_index = static_cast<long long>(std::min(a.size(), b.size()));
    r.max_abs_diff = std::numeric_limits<double>::infinity();
    return;
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double x = static_cast<double>(a[i]), y = static_cast<double>(b[i]);
    // Bitwise equality semantics for floats: NaN == NaN counts as equal here.
    if (x == y || (std::isnan(x) && std::isnan(y))) continue;
    if (r.equal) r.first_div_index = static_cast<long long>(i);
    r.equal = false;
    r.max_abs_diff = std::max(r.max_abs_diff, std::abs(x - y));
  }
}

}  // namespace

const TraceRecord* TraceReport::find(const std::string& signal, std::size_t frame) const {
  for (const TraceRecord& r : records) {
    if (r.signal == signal && r.frame == frame) return &r;
  }
  return nullptr;
}

std::string TraceReport::csv() const {
  std::string out = "signal,subpath,frame,equal,max_abs_diff,first_div_index\n";
  char buf[160];
  for (const TraceRecord& r : records) {
    std::snprintf(buf, sizeof buf, "%s,%s,%zu,%d,%.9g,%lld\n", r.signal.c_str(), codec::subpath_name(r.subpath), r.frame,
                  r.equal ? 1 : 0, r.max_abs_diff, r.first_div_index);
    out += buf;
  }
  return out;
}

TraceReport compare_signals(const std::vector<codec::FrameSignals>& a, const std::vector<codec::FrameSignals>& b,
                            bool mean_offset) {
  TraceReport rep;
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t t = 0; t < n; ++t) {
    const codec::FrameSignals& x = a[t];
    const codec::FrameSignals& y = b[t];
    const codec::SubPath sp = t == 0 ? codec::SubPath::intra : codec::SubPath::residual;
    for (const char* name : kTraceSignals) {
      TraceRecord r;
      r.signal = name;
      r.subpath = sp;
      r.frame = t;
      const std::string s = name;
      if (s == "z_hat") {
        diff(x.z_hat.data(), y.z_hat.data(), r);
      } else if (s == "mu") {
        if (mean_offset) {
          diff(std::span<const float>(x.params.mu), std::span<const float>(y.params.mu), r);
        } else {
          diff(std::span<const std::int32_t>(x.params.mu_shift), std::span<const std::int32_t>(y.params.mu_shift), r);
        }
      } else if (s == "sigma_idx") {
        diff(std::span<const std::uint8_t>(x.params.sigma_idx), std::span<const std::uint8_t>(y.params.sigma_idx), r);
      } else if (s == "y_hat") {
        diff(std::span<const std::int32_t>(x.y_hat), std::span<const std::int32_t>(y.y_hat), r);
      } else {
        diff(std::span<const std::uint8_t>(x.recon.samples), std::span<const std::uint8_t>(y.recon.samples), r);
      }
      if (!r.equal && !rep.first_divergence) rep.first_divergence = rep.records.size();
      rep.records.push_back(std::move(r));
    }
  }
  return rep;
}

TraceReport trace_decode(const codec::Model& model, const codec::Bitstream& bs, const FloatEngine& engine_a,
                         const FloatEngine& engine_b) {
  const auto a = codec::decode_sequence(model, bs, engine_a, true);
  const auto b = codec::decode_sequence(model, bs, engine_b, true);
  return compare_signals(a.signals, b.signals, bs.mean_offset());
}

}  // namespace sqv::eval
