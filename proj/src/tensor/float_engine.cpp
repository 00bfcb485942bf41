#include "sqv/float_engine.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <vector>

#include "sqv/common/error.hpp"
#include "sqv/common/rng.hpp"
#include "sqv/simd/kernels.hpp"

namespace sqv {

namespace {

float sequential(std::span<const float> v) {
  float acc = 0.0f;
  for (float x : v) acc += x;
  return acc;
}

// Adjacent pairs per level; an odd tail element is carried up unchanged.
float pairwise(std::vector<float>& v) {
  std::size_t n = v.size();
  if (n == 0) return 0.0f;
  while (n > 1) {
    const std::size_t half = n / 2;
    for (std::size_t i = 0; i < half; ++i) v[i] = v[2 * i] + v[2 * i + 1];
    if (n & 1) v[half] = v[n - 1];
    n = half + (n & 1);
  }
  return v[0];
}

float step(float v, std::uint64_t h) {
  if (std::isnan(v)) return v;
  return std::nextafter(v, (h & 1) ? std::numeric_limits<float>::infinity() : -std::numeric_limits<float>::infinity());
}

std::vector<float>& scratch() {
  thread_local std::vector<float> buf;
  return buf;
}

}  // namespace

FloatEngine FloatEngine::parse(std::string_view text) {
  if (text == "reference") return reference();
  if (text == "reassoc") return reassoc();
  if (text == "fma") return fma();
  if (text == "host") return host();
  std::string_view digits;
  if (text.starts_with("ulp:")) {
    digits = text.substr(4);
  } else if (text.starts_with("ulp(") && text.ends_with(")")) {
    digits = text.substr(4, text.size() - 5);
  } else {
    throw ConfigError("unknown float engine \"" + std::string(text) + "\"");
  }
  std::uint64_t seed = 0;
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), seed);
  if (ec != std::errc{} || ptr != digits.data() + digits.size() || digits.empty()) {
    throw ConfigError("bad ulp seed in \"" + std::string(text) + "\"");
  }
  return ulp(seed);
}

std::string FloatEngine::name() const {
  switch (mode) {
    case EngineMode::reference: return "reference";
    case EngineMode::reassoc: return "reassoc";
    case EngineMode::fma: return "fma";
    case EngineMode::host: return "host";
    case EngineMode::ulp: return "ulp:" + std::to_string(seed);
  }
  return "?";
}

float accumulate(std::span<const float> values, const FloatEngine& engine) {
  switch (engine.mode) {
    case EngineMode::reassoc: {
      auto& buf = scratch();
      buf.assign(values.begin(), values.end());
      return pairwise(buf);
    }
    case EngineMode::host:
      return simd::sum_striped8(values);
    case EngineMode::reference:
    case EngineMode::fma:
    case EngineMode::ulp:
      break;
  }
  return sequential(values);
}

float dot(float bias, std::span<const float> weights, std::span<const float> inputs, const FloatEngine& engine,
          std::uint64_t key) {
  const std::size_t n = weights.size();
  switch (engine.mode) {
    case EngineMode::ulp: {
      float acc = bias;
      for (std::size_t i = 0; i < n; ++i) {
        const float p = weights[i] * inputs[i];
        acc = step(acc + p, splitmix64(key + i));
      }
      return acc;
    }
    case EngineMode::reference: {
      float acc = bias;
      for (std::size_t i = 0; i < n; ++i) {
        const float p = weights[i] * inputs[i];
        acc += p;
      }
      return acc;
    }
    case EngineMode::fma: {
      // f32 x f32 is exact in f64; the sum is rounded once per term.
      float acc = bias;
      for (std::size_t i = 0; i < n; ++i) {
        acc = static_cast<float>(static_cast<double>(acc) +
                                 static_cast<double>(weights[i]) * static_cast<double>(inputs[i]));
      }
      return acc;
    }
    case EngineMode::reassoc:
    case EngineMode::host: {
      auto& buf = scratch();
      buf.resize(n + 1);
      buf[0] = bias;
      for (std::size_t i = 0; i < n; ++i) buf[i + 1] = weights[i] * inputs[i];
      if (engine.mode == EngineMode::host) return simd::sum_striped8(buf);
      return pairwise(buf);
    }
  }
  return 0.0f;
}

std::uint64_t ulp_key(const FloatEngine& engine, std::uint32_t layer, std::uint64_t element) {
  return hash3(engine.seed, layer, element);
}

float ulp_nudge(float value, const FloatEngine& engine, std::uint32_t layer, std::uint64_t element) {
  if (engine.mode != EngineMode::ulp) return value;
  return step(value, ulp_key(engine, layer, element));
}

}  // namespace sqv
