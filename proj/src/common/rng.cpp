#include "sqv/common/rng.hpp"

namespace sqv {

double Rng::normal() {
  double s = 0.0;
  for (int i = 0; i < 12; ++i) s += uniform();
  return s - 6.0;
}

}  // namespace sqv
