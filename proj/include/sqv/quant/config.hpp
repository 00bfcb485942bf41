#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "sqv/quant/observer.hpp"
#include "sqv/quant/qparams.hpp"

namespace sqv::quant {

enum class QScheme : std::uint8_t {
  per_tensor_symmetric = 0,
  per_tensor_affine = 1,
  per_channel_symmetric = 2,
  per_channel_affine = 3,
};

constexpr bool is_per_channel(QScheme s) {
  return s == QScheme::per_channel_symmetric || s == QScheme::per_channel_affine;
}
constexpr Scheme base_scheme(QScheme s) {
  return (s == QScheme::per_tensor_symmetric || s == QScheme::per_channel_symmetric) ? Scheme::symmetric
                                                                                      : Scheme::affine;
}
std::string_view scheme_name(QScheme s);  // "pts", "pta", "pcs", "pca"
QScheme parse_scheme(std::string_view name);

struct QConfig {
  int config_id = -1;
  ObserverKind act_observer = ObserverKind::histogram;
  QScheme act_scheme = QScheme::per_tensor_symmetric;
  ObserverKind weight_observer = ObserverKind::histogram;
  QScheme weight_scheme = QScheme::per_tensor_symmetric;
  double averaging_constant = kDefaultAveragingConstant;

  std::string label() const;  // e.g. "histogram/pts+histogram/pta"
};

struct Validation {
  bool ok = true;
  std::string reason;  // "; "-joined violated rules, empty when ok
};

inline constexpr std::string_view kReasonDeconv = "per-channel weight quantization unsupported on transposed convolutions";
inline constexpr std::string_view kReasonHistogram = "histogram observer supports only per-tensor granularity";
inline constexpr std::string_view kReasonActChannel = "activations must use per-tensor quantization";

// Rules: per-channel weights are rejected when the target path has transposed
// convolutions; a histogram observer cannot be per-channel; activations are
// per-tensor only.
Validation validate_config(const QConfig& qc, bool path_has_transposed_conv = true);

// Act observer x act scheme (pts, pta) x weight observer x weight scheme
// (pts, pta, pcs, pca), act side outermost; config_id is the list index.
std::vector<QConfig> enumerate_configs();

}  // namespace sqv::quant
