#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace sqv {

// A FloatEngine fixes every rounding decision made by the float kernels, so a
// "different machine" can be emulated deterministically inside one process.
//
//   reference  strict left-to-right f32 accumulation, no contraction
//   reassoc    balanced pairwise (tree) accumulation
//   fma        each product kept exact and added with a single rounding
//   ulp        reference order, but every partial sum of a conv dot product
//              is moved one ulp up or down by a seeded hash
//   host       8-lane striped accumulation (what a vectorizing compiler does);
//              dispatched to AVX2 when available, bit-identical to the scalar
//              emulation
enum class EngineMode : std::uint8_t { reference, reassoc, fma, ulp, host };

struct FloatEngine {
  EngineMode mode = EngineMode::reference;
  std::uint64_t seed = 0;

  static constexpr FloatEngine reference() { return {EngineMode::reference, 0}; }
  static constexpr FloatEngine reassoc() { return {EngineMode::reassoc, 0}; }
  static constexpr FloatEngine fma() { return {EngineMode::fma, 0}; }
  static constexpr FloatEngine ulp(std::uint64_t seed) { return {EngineMode::ulp, seed}; }
  static constexpr FloatEngine host() { return {EngineMode::host, 0}; }

  // Accepts "reference", "reassoc", "fma", "host", "ulp:<seed>" and "ulp(<seed>)".
  static FloatEngine parse(std::string_view text);
  std::string name() const;

  constexpr bool operator==(const FloatEngine&) const = default;
};

// Sum of `values` under the engine's association order. For fma and ulp this
// is the reference order (there are no products to fuse and no conv outputs
// to perturb).
float accumulate(std::span<const float> values, const FloatEngine& engine);

// bias + sum_i weights[i] * inputs[i], terms taken in index order. `key`
// seeds the ulp engine's per-step perturbation (see ulp_key) and is ignored
// by the other engines.
float dot(float bias, std::span<const float> weights, std::span<const float> inputs, const FloatEngine& engine,
          std::uint64_t key = 0);

// Perturbation key for one conv output element, stable across frames and runs.
std::uint64_t ulp_key(const FloatEngine& engine, std::uint32_t layer, std::uint64_t element);

// One seeded ulp step of `value`; identity for non-ulp engines.
float ulp_nudge(float value, const FloatEngine& engine, std::uint32_t layer, std::uint64_t element);

}  // namespace sqv
