#pragma once

#include <span>
#include <string>
#include <vector>

#include "sqv/codec/model.hpp"
#include "sqv/codec/sequence.hpp"
#include "sqv/eval/report.hpp"
#include "sqv/quant/config.hpp"
#include "sqv/search/clips.hpp"

namespace sqv::search {

using quant::enumerate_configs;

enum class RowStatus : std::uint8_t { ok, incompatible, failed };
const char* status_name(RowStatus s);

struct SearchRow {
  quant::QConfig config;
  RowStatus status = RowStatus::failed;
  std::string reason;
  double bd_rate_percent = 0.0;  // meaningful only when ok
  std::vector<eval::QualityPoint> points;
};

struct SearchOptions {
  std::vector<int> qualities = {1, 2, 3, 4, 5, 6, 7, 8, 9};
  FloatEngine engine = FloatEngine::reference();
  // 0: SQV_THREADS if set, else the hardware concurrency.
  unsigned threads = 0;
  // Also decode every stream and require it to match the encoder loop.
  bool verify_decode = true;
};

struct SearchResult {
  std::vector<eval::QualityPoint> baseline;  // float hyper prior, same model
  std::vector<SearchRow> rows;               // ok rows by bd_rate, then the rest by id
};

// bpp over all clips (total bits / total pixels) and PSNR of the mean MSE,
// at each quality.
std::vector<eval::QualityPoint> evaluate_rd(const codec::Model& model, std::span<const Clip> clips,
                                            std::span<const int> qualities, const codec::CodecOptions& opt,
                                            bool verify_decode = true);

SearchResult run_search(const codec::Model& model, std::span<const Clip> calib, std::span<const Clip> test,
                        const SearchOptions& opt = {});

unsigned resolve_threads(unsigned requested);

// config_id,act_observer,act_scheme,wt_observer,wt_scheme,status,reason,bd_rate_percent,bpp_q1,psnr_q1,...
std::string search_csv(const SearchResult& r);
// Best and worst four ok configurations plus status counts.
std::string search_summary(const SearchResult& r);

}  // namespace sqv::search
