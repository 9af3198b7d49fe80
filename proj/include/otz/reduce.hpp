#pragma once

#include <cstddef>
#include <span>

namespace otz {

// Pairwise (tree) summation with a fixed split rule. Every reduction in the
// library goes through this so that results do not depend on how the summed
// values were stored.
double pairwise_sum(const double* x, std::size_t n);

inline double pairwise_sum(std::span<const double> x) {
  return pairwise_sum(x.data(), x.size());
}

// x^e for x > 0, evaluated as exp(e * log(x)). Returns exactly 1 at x == 1.
double pow_pos(double x, double e);

}  // namespace otz
