#pragma once

#include <array>
#include <span>
#include <vector>

#include "sqv/codec/frame.hpp"
#include "sqv/codec/hyper.hpp"
#include "sqv/codec/model.hpp"
#include "sqv/float_engine.hpp"
#include "sqv/quant/config.hpp"

namespace sqv::quant {

using Clip = std::vector<codec::Frame>;

// Float hyper-synthesis activations recorded while float-encoding the
// calibration clips, in encode order, per sub-path.
struct CalibrationData {
  std::array<std::vector<codec::HyperActivations>, 2> activations;
};

// Encodes every clip at every listed quality (all nine when empty) in float
// mode under `engine` and records the hyper-decoder inputs and outputs.
CalibrationData collect_calibration(const codec::Model& model, std::span<const Clip> clips, const FloatEngine& engine,
                                    std::span<const int> qualities = {});

// Observers -> qparams -> int8 weights / int32 biases for both sub-paths.
// Throws ConfigError for an invalid config.
codec::QuantizedPair convert(const codec::Model& model, const CalibrationData& data, const QConfig& qc);

codec::QuantizedPair calibrate_and_convert(const codec::Model& model, std::span<const Clip> clips, const QConfig& qc,
                                           const FloatEngine& engine, std::span<const int> qualities = {});

}  // namespace sqv::quant
