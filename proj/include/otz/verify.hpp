#pragma once

#include <span>

#include "otz/instance.hpp"
#include "otz/solver.hpp"

namespace otz {

struct OptimalityReport {
  // Max relative violation of the scaling fixed-point relations
  // t = d1 o K o d2, d1 = u/(K d2), d2 = (v_tilde/(d1^T K))^(g/(1+g)).
  double fixed_point_residual = 0;
  double row_residual = 0;      // max_i |row_sum_i - u_i| / u_i
  double balance_residual = 0;  // |sum(v*) - sum(u)| / sum(u)
  double min_support_entry = 0;
  double min_v_star = 0;        // min_j v*_j
  bool positivity_ok = false;   // true iff min_support_entry > 0
  int support_components = 1;   // connected components of the support graph
};

// Certifies a candidate plan against the optimality conditions. Scalings are
// recovered from log(t/k) = log d1_i + log d2_j by least squares on the
// support graph (they are only determined up to a per-component scale; d1 is
// then defined through the row relation and the remaining scale is pinned
// against the column relation). Works per connected component, so a
// disconnected support is handled, not rejected. Requires plan > 0 on the
// support.
OptimalityReport check_kkt(const ProblemInstance& inst,
                           const TransportPlan& plan,
                           std::span<const double> v_star);

// True iff entries on the pattern are exactly zero and every other entry is
// strictly positive.
bool check_positivity(const DenseMatrix& plan, const ZeroPattern& pattern);

// Row sums, balance of the relaxed marginal against sum(u), positivity of
// v* and of the plan's support entries. Requires report.termination ==
// Converged. fixed_point_residual is not evaluated here (NaN).
OptimalityReport check_limit_properties(const SolveReport& report,
                                        const ProblemInstance& inst);

// Combined certification of a raw plan (e.g. loaded from a file): pattern
// zeros + nonnegativity, then the fixed-point residuals on the support.
OptimalityReport check_solution(const ProblemInstance& inst,
                                const DenseMatrix& plan,
                                std::span<const double> v_star);

// Reference minimizer for tiny instances, independent of the scaling
// algorithms: rows are parametrized by eliminating one support entry each
// (row sums then hold by construction), the free entries are scanned on a
// 64-point grid and refined by coordinate golden-section search. Requires
// m*n <= 12 and m*n - m <= 4 (TooLarge otherwise).
TransportPlan oracle_minimize(const ProblemInstance& inst);

}  // namespace otz
