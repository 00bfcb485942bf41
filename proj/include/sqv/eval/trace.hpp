#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sqv/codec/model.hpp"
#include "sqv/codec/sequence.hpp"

namespace sqv::eval {

// Signal order is upstream to downstream.
inline constexpr const char* kTraceSignals[] = {"z_hat", "mu", "sigma_idx", "y_hat", "recon"};

struct TraceRecord {
  std::string signal;
  codec::SubPath subpath = codec::SubPath::intra;
  std::size_t frame = 0;
  bool equal = true;
  double max_abs_diff = 0.0;
  long long first_div_index = -1;  // flat index of the first differing element
};

struct TraceReport {
  std::vector<TraceRecord> records;  // frame-major, then signal order
  std::optional<std::size_t> first_divergence;  // index into records

  bool all_equal() const { return !first_divergence.has_value(); }
  const TraceRecord* find(const std::string& signal, std::size_t frame) const;
  // signal,subpath,frame,equal,max_abs_diff,first_div_index
  std::string csv() const;
};

// Compares the traced signals of two decodes. mu is the value the coder
// actually uses: the integer shift, or the fractional mean in mean-offset mode.
TraceReport compare_signals(const std::vector<codec::FrameSignals>& a, const std::vector<codec::FrameSignals>& b,
                            bool mean_offset);

TraceReport trace_decode(const codec::Model& model, const codec::Bitstream& bs, const FloatEngine& engine_a,
                         const FloatEngine& engine_b);

}  // namespace sqv::eval
