#pragma once

#include <cstdint>
#include <vector>

#include "sqv/tensor.hpp"

namespace sqv::codec {

// 8-bit luma frame, row-major.
struct Frame {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> samples;

  Frame() = default;
  Frame(int w, int h, std::uint8_t fill = 0);
  Frame(int w, int h, std::vector<std::uint8_t> data);

  std::uint8_t at(int x, int y) const { return samples[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t& at(int x, int y) { return samples[static_cast<std::size_t>(y) * width + x]; }
  std::size_t size() const { return samples.size(); }

  bool operator==(const Frame&) const = default;
};

inline constexpr int kDimMultiple = 16;

// Throws ShapeError unless both dims are positive multiples of 16 that fit u16.
void check_frame_dims(int width, int height);

// (x - offset) / 128 as a [1, 1, h, w] tensor. All values are exact in f32.
Tensor frame_to_tensor(const Frame& f, float offset = 128.0f);

}  // namespace sqv::codec
