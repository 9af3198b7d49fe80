#include "otz/reduce.hpp"

#include <cmath>

namespace otz {

namespace {
constexpr std::size_t kSequentialCutoff = 16;
}

double pairwise_sum(const double* x, std::size_t n) {
  if (n <= kSequentialCutoff) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(x, half) + pairwise_sum(x + half, n - half);
}

double pow_pos(double x, double e) {
  return std::exp(e * std::log(x));
}

}  // namespace otz
