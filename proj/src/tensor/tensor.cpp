#include "sqv/tensor.hpp"

namespace sqv {

std::string Shape::str() const {
  return "(" + std::to_string(n) + "," + std::to_string(c) + "," + std::to_string(h) + "," + std::to_string(w) + ")";
}

Tensor relu(const Tensor& t) {
  std::vector<float> out(t.data().begin(), t.data().end());
  for (float& v : out) v = v > 0.0f ? v : 0.0f;
  return Tensor(t.shape(), std::move(out));
}

}  // namespace sqv
