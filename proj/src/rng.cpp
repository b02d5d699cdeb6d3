#include "erasure/rng.hpp"

#include <cmath>

namespace erasure {

double round_half_even(double x) {
  if (std::abs(x - std::trunc(x)) == 0.5) return 2.0 * std::round(x / 2.0);
  return std::round(x);
}

}  // namespace erasure
