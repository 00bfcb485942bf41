#include "sqv/search/search.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <thread>

#include "sqv/eval/bd.hpp"
#include "sqv/eval/metrics.hpp"
#include "sqv/quant/calibrate.hpp"

namespace sqv::search {

const char* status_name(RowStatus s) {
  switch (s) {
    case RowStatus::ok: return "ok";
    case RowStatus::incompatible: return "incompatible";
    case RowStatus::failed: return "failed";
  }
  return "?";
}

unsigned resolve_threads(unsigned requested) {
  unsigned n = requested;
  if (n == 0) {
    if (const char* env = std::getenv("SQV_THREADS")) n = static_cast<unsigned>(std::strtoul(env, nullptr, 10));
  }
  if (n == 0) n = std::thread::hardware_concurrency();
  return std::max(1u, n);
}

std::vector<eval::QualityPoint> evaluate_rd(const codec::Model& model, std::span<const Clip> clips,
                                            std::span<const int> qualities, const codec::CodecOptions& opt,
                                            bool verify_decode) {
  std::vector<eval::QualityPoint> pts;
  for (int q : qualities) {
    double bits = 0.0, pixels = 0.0, sse = 0.0;
    for (const Clip& clip : clips) {
      codec::EncodeResult enc = codec::encode_sequence(model, clip, q, opt);
      if (verify_decode) {
        const codec::DecodeResult dec = codec::decode_sequence(model, enc.bitstream, opt.engine);
        if (dec.frames != enc.recon) throw Error(ErrorKind::model, "decoder left the encoder's reconstruction loop");
      }
      bits += 8.0 * static_cast<double>(enc.bitstream.byte_size());
      for (std::size_t i = 0; i < clip.size(); ++i) {
        const double n = static_cast<double>(clip[i].size());
        pixels += n;
        sse += eval::mse(clip[i], enc.recon[i]) * n;
      }
    }
    pts.push_back({q, {bits / pixels, eval::psnr_from_mse(sse / pixels)}});
  }
  return pts;
}

namespace {

template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn fn) {
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) fn(i);
  };
  const unsigned t = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1)));
  if (t <= 1) {
    worker();
    return;
  }
  std::vector<std::thread> pool;
  for (unsigned k = 0; k < t; ++k) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

}  // namespace

SearchResult run_search(const codec::Model& base_model, std::span<const Clip> calib, std::span<const Clip> test,
                        const SearchOptions& opt) {
  codec::Model model = base_model;
  model.clear_quantized();
  SearchResult res;
  codec::CodecOptions fopt;
  fopt.mode = codec::HpMode::float_mode;
  fopt.engine = opt.engine;
  res.baseline = evaluate_rd(model, test, opt.qualities, fopt, opt.verify_decode);
  const eval::RDCurve base_curve = eval::curve_of(res.baseline);

  const quant::CalibrationData data = quant::collect_calibration(model, calib, opt.engine, opt.qualities);
  const auto configs = enumerate_configs();
  std::vector<SearchRow> rows(configs.size());
  parallel_for(configs.size(), resolve_threads(opt.threads), [&](std::size_t i) {
    SearchRow& row = rows[i];
    row.config = configs[i];
    const quant::Validation v = quant::validate_config(configs[i], true);
    if (!v.ok) {
      row.status = RowStatus::incompatible;
      row.reason = v.reason;
      return;
    }
    try {
      codec::Model qm = model;
      qm.set_quantized(quant::convert(model, data, configs[i]));
      codec::CodecOptions qopt;
      qopt.mode = codec::HpMode::quantized;
      qopt.engine = opt.engine;
      row.points = evaluate_rd(qm, test, opt.qualities, qopt, opt.verify_decode);
      row.bd_rate_percent = eval::bd_rate(base_curve, eval::curve_of(row.points));
      if (!std::isfinite(row.bd_rate_percent)) throw RangeError("non-finite BD-rate");
      row.status = RowStatus::ok;
    } catch (const std::exception& e) {
      row.status = RowStatus::failed;
      row.reason = e.what();
    }
  });

  std::stable_sort(rows.begin(), rows.end(), [](const SearchRow& a, const SearchRow& b) {
    const bool ao = a.status == RowStatus::ok, bo = b.status == RowStatus::ok;
    if (ao != bo) return ao;
    if (ao && a.bd_rate_percent != b.bd_rate_percent) return a.bd_rate_percent < b.bd_rate_percent;
    return a.config.config_id < b.config.config_id;
  });
  res.rows = std::move(rows);
  return res;
}

namespace {

std::string clean(std::string s) {
  for (char& c : s) {
    if (c == ',' || c == '\n' || c == '"') c = ' ';
  }
  return s;
}

}  // namespace

std::string search_csv(const SearchResult& r) {
  std::string out = "config_id,act_observer,act_scheme,wt_observer,wt_scheme,status,reason,bd_rate_percent";
  const std::size_t nq = r.baseline.size();
  for (const auto& q : r.baseline) out += ",bpp_q" + std::to_string(q.quality) + ",psnr_q" + std::to_string(q.quality);
  out += "\n";
  char buf[64];
  for (const SearchRow& row : r.rows) {
    const quant::QConfig& c = row.config;
    out += std::to_string(c.config_id) + "," + std::string(quant::observer_name(c.act_observer)) + "," +
           std::string(quant::scheme_name(c.act_scheme)) + "," + std::string(quant::observer_name(c.weight_observer)) +
           "," + std::string(quant::scheme_name(c.weight_scheme)) + "," + status_name(row.status) + "," +
           clean(row.reason) + ",";
    if (row.status == RowStatus::ok) {
      std::snprintf(buf, sizeof buf, "%.6f", row.bd_rate_percent);
      out += buf;
    }
    for (std::size_t k = 0; k < nq; ++k) {
      if (row.status == RowStatus::ok && k < row.points.size()) {
        std::snprintf(buf, sizeof buf, ",%.6f,", row.points[k].point.bpp);
        out += buf;
        out += eval::format_psnr(row.points[k].point.psnr);
      } else {
        out += ",,";
      }
    }
    out += "\n";
  }
  return out;
}

std::string search_summary(const SearchResult& r) {
  std::size_t ok = 0, inc = 0, failed = 0;
  std::vector<const SearchRow*> good;
  for (const SearchRow& row : r.rows) {
    if (row.status == RowStatus::ok) {
      ++ok;
      good.push_back(&row);
    } else if (row.status == RowStatus::incompatible) {
      ++inc;
    } else {
      ++failed;
    }
  }
  std::string out;
  char buf[200];
  std::snprintf(buf, sizeof buf, "configs: %zu  ok: %zu  incompatible: %zu  failed: %zu\n", r.rows.size(), ok, inc,
                failed);
  out += buf;
  auto line = [&](const SearchRow& row) {
    std::snprintf(buf, sizeof buf, "  %3d  %-36s  BD-rate %+9.3f%%\n", row.config.config_id, row.config.label().c_str(),
                  row.bd_rate_percent);
    out += buf;
  };
  out += "best:\n";
  for (std::size_t i = 0; i < std::min<std::size_t>(4, good.size()); ++i) line(*good[i]);
  out += "worst:\n";
  for (std::size_t i = good.size() > 4 ? good.size() - 4 : 0; i < good.size(); ++i) line(*good[i]);
  return out;
}

}  // namespace sqv::search
