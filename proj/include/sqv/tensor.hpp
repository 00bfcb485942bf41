#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sqv/common/error.hpp"

namespace sqv {

struct Shape {
  std::size_t n = 0, c = 0, h = 0, w = 0;

  constexpr std::size_t numel() const { return n * c * h * w; }
  constexpr bool operator==(const Shape&) const = default;
  std::string str() const;
};

enum class DType : std::uint8_t { f32, i8, i32 };

template <class T>
struct DTypeOf;
template <>
struct DTypeOf<float> {
  static constexpr DType value = DType::f32;
};
template <>
struct DTypeOf<std::int8_t> {
  static constexpr DType value = DType::i8;
};
template <>
struct DTypeOf<std::int32_t> {
  static constexpr DType value = DType::i32;
};

// Dense NCHW tensor with row-major storage. The value range of the element
// type (i8 / i32) is the tensor's range invariant.
template <class T>
class BasicTensor {
 public:
  static constexpr DType dtype = DTypeOf<T>::value;

  BasicTensor() = default;
  explicit BasicTensor(Shape shape, T fill = T{}) : shape_(shape), data_(shape.numel(), fill) {}
  BasicTensor(Shape shape, std::vector<T> data) : shape_(shape), data_(std::move(data)) {
    if (data_.size() != shape_.numel()) {
      throw ShapeError("data.len vs n*c*h*w", std::to_string(data_.size()) + " values for shape " + shape_.str());
    }
  }

  const Shape& shape() const { return shape_; }
  std::size_t numel() const { return data_.size(); }
  std::span<const T> data() const { return data_; }
  std::span<T> data() { return data_; }
  const std::vector<T>& values() const { return data_; }

  std::size_t index(std::size_t n, std::size_t c, std::size_t h, std::size_t w) const {
    return ((n * shape_.c + c) * shape_.h + h) * shape_.w + w;
  }
  T at(std::size_t n, std::size_t c, std::size_t h, std::size_t w) const { return data_[index(n, c, h, w)]; }
  T& at(std::size_t n, std::size_t c, std::size_t h, std::size_t w) { return data_[index(n, c, h, w)]; }

  // Contiguous (h, w) plane of one channel.
  std::span<const T> plane(std::size_t n, std::size_t c) const {
    return std::span<const T>(data_).subspan(index(n, c, 0, 0), shape_.h * shape_.w);
  }

  bool operator==(const BasicTensor&) const = default;

 private:
  Shape shape_{};
  std::vector<T> data_;
};

using Tensor = BasicTensor<float>;
using TensorI8 = BasicTensor<std::int8_t>;
using TensorI32 = BasicTensor<std::int32_t>;

// Elementwise max(0, x).
Tensor relu(const Tensor& t);

}  // namespace sqv
