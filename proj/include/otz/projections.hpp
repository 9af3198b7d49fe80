#pragma once

#include <span>
#include <vector>

#include "otz/instance.hpp"

namespace otz {

// Point of the augmented space (plan, relaxed column marginal).
struct AugmentedPoint {
  SupportMatrix t;
  std::vector<double> v;
};

// KL projection onto {row sums == u_tilde}: t* = diag(u/row_sums(s)) s,
// v unchanged. Pure; inputs are not mutated.
AugmentedPoint project_rows(const AugmentedPoint& x,
                            std::span<const double> u_tilde);

// KL projection onto the coupling {column sums of t == v}: with
// c2_j = (v_j / col_sums(s)_j)^(gamma/(1+gamma)),
// t* = s diag(c2) and v*_j = c2_j^(-1/gamma) v_j.
AugmentedPoint project_columns(const AugmentedPoint& x, double gamma);

// Alternating projection driver from x(0) = (kernel, v_tilde). Element l of
// the result is the point after l row+column cycles; the t sequence matches
// solve_alg1's iterates exactly.
std::vector<AugmentedPoint> alternate(const ProblemInstance& inst,
                                      long iterations,
                                      StorageLayout layout = StorageLayout::Auto);

}  // namespace otz
