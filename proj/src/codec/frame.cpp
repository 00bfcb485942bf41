#include "sqv/codec/frame.hpp"

#include <string>

namespace sqv::codec {

Frame::Frame(int w, int h, std::uint8_t fill)
    : width(w), height(h), samples(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill) {}

Frame::Frame(int w, int h, std::vector<std::uint8_t> data) : width(w), height(h), samples(std::move(data)) {
  if (samples.size() != static_cast<std::size_t>(w) * static_cast<std::size_t>(h)) {
    throw ShapeError("frame.samples vs width*height",
                     std::to_string(samples.size()) + " samples for " + std::to_string(w) + "x" + std::to_string(h));
  }
}

void check_frame_dims(int width, int height) {
  if (width <= 0 || height <= 0 || width % kDimMultiple != 0 || height % kDimMultiple != 0 || width > 65535 ||
      height > 65535) {
    throw ShapeError("frame.width/height", std::to_string(width) + "x" + std::to_string(height) +
                                               " is not a positive multiple of 16");
  }
}

Tensor frame_to_tensor(const Frame& f, float offset) {
  Tensor t(Shape{1, 1, static_cast<std::size_t>(f.height), static_cast<std::size_t>(f.width)});
  auto d = t.data();
  for (std::size_t i = 0; i < f.samples.size(); ++i) d[i] = (static_cast<float>(f.samples[i]) - offset) / 128.0f;
  return t;
}

}  // namespace sqv::codec
