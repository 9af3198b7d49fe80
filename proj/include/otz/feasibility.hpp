#pragma once

#include "otz/instance.hpp"

namespace otz {

enum class Feasibility { Feasible, Infeasible };

// Decides whether any plan with row sums exactly u_tilde and column sums
// exactly v_tilde exists on the allowed support, via max-flow on the bipartite
// support graph (source -> rows at u_i, row -> col for allowed entries,
// col -> sink at v_j). Requires balanced marginals within balance_rel_tol
// (UnbalancedInput otherwise) and m*n <= 1e6 (TooLarge).
Feasibility check_feasibility_exact(const ProblemInstance& inst,
                                    double balance_rel_tol = 1e-9);

}  // namespace otz
