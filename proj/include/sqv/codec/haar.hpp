#pragma once

#include <cstdint>

#include "sqv/codec/frame.hpp"
#include "sqv/tensor.hpp"

namespace sqv::codec {

inline constexpr int kHaarLevels = 2;
inline constexpr std::size_t kLatentChannels = 16;  // 4^levels packet subbands
inline constexpr int kLatentStride = 4;             // 2^levels

// Two-level orthonormal Haar packet: a stride-2 2x2 conv (1 -> 4) followed by
// a block-diagonal stride-2 2x2 conv (4 -> 16). Channel 4a + b is 2nd-level
// subband b of 1st-level subband a; channel 0 carries the DC.
Tensor haar_analysis(const Tensor& x);
// Exact inverse of haar_analysis via the transposed convolutions.
Tensor haar_synthesis(const Tensor& y);

// y = haar_analysis((x - 128) / 128).
Tensor main_analysis(const Frame& frame);
// clamp(round_half_even(base + 128 * haar_synthesis(v))), with base 128 for an
// intra frame or the previous reconstruction for an inter frame.
Frame main_synthesis(const Tensor& v, int width, int height);
Frame main_synthesis(const Tensor& v, const Frame& base);

}  // namespace sqv::codec
