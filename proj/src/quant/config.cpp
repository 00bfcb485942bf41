#include "sqv/quant/config.hpp"

namespace sqv::quant {

std::string_view scheme_name(QScheme s) {
  switch (s) {
    case QScheme::per_tensor_symmetric: return "pts";
    case QScheme::per_tensor_affine: return "pta";
    case QScheme::per_channel_symmetric: return "pcs";
    case QScheme::per_channel_affine: return "pca";
  }
  return "?";
}

QScheme parse_scheme(std::string_view name) {
  if (name == "pts") return QScheme::per_tensor_symmetric;
  if (name == "pta") return QScheme::per_tensor_affine;
  if (name == "pcs") return QScheme::per_channel_symmetric;
  if (name == "pca") return QScheme::per_channel_affine;
  throw ConfigError("unknown quantization scheme '" + std::string(name) + "' (pts, pta, pcs, pca)");
}

std::string QConfig::label() const {
  return std::string(observer_name(act_observer)) + "/" + std::string(scheme_name(act_scheme)) + "+" +
         std::string(observer_name(weight_observer)) + "/" + std::string(scheme_name(weight_scheme));
}

Validation validate_config(const QConfig& qc, bool path_has_transposed_conv) {
  std::vector<std::string_view> reasons;
  if (path_has_transposed_conv && is_per_channel(qc.weight_scheme)) reasons.push_back(kReasonDeconv);
  if ((qc.weight_observer == ObserverKind::histogram && is_per_channel(qc.weight_scheme)) ||
      (qc.act_observer == ObserverKind::histogram && is_per_channel(qc.act_scheme))) {
    reasons.push_back(kReasonHistogram);
  }
  if (is_per_channel(qc.act_scheme)) reasons.push_back(kReasonActChannel);

  Validation v;
  v.ok = reasons.empty();
  for (std::size_t i = 0; i < reasons.size(); ++i) {
    if (i) v.reason += "; ";
    v.reason += reasons[i];
  }
  return v;
}

std::vector<QConfig> enumerate_configs() {
  constexpr ObserverKind observers[] = {ObserverKind::histogram, ObserverKind::min_max,
                                        ObserverKind::moving_average_min_max};
  constexpr QScheme act_schemes[] = {QScheme::per_tensor_symmetric, QScheme::per_tensor_affine};
  constexpr QScheme wt_schemes[] = {QScheme::per_tensor_symmetric, QScheme::per_tensor_affine,
                                    QScheme::per_channel_symmetric, QScheme::per_channel_affine};
  std::vector<QConfig> out;
  for (ObserverKind ao : observers) {
    for (QScheme as : act_schemes) {
      for (ObserverKind wo : observers) {
        for (QScheme ws : wt_schemes) {
          QConfig qc;
          qc.config_id = static_cast<int>(out.size());
          qc.act_observer = ao;
          qc.act_scheme = as;
          qc.weight_observer = wo;
          qc.weight_scheme = ws;
          out.push_back(qc);
        }
      }
    }
  }
  return out;
}

}  // namespace sqv::quant
