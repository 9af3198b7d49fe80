#pragma once

#include <span>

#include "otz/instance.hpp"

namespace otz {

// Generalized KL term for one entry with reference t_ref > 0:
//   t == 0        ->  t_ref
//   t  > 0        ->  t*log(t/t_ref) - t + t_ref
// The t == 0 branch is exact, not an epsilon limit. Negative t or
// nonpositive t_ref is a DomainError.
double kl_scalar(double t, double t_ref);

// Sum of kl_scalar over the support. Patterns must match structurally
// (PatternMismatch otherwise); the reference must be positive on the support.
double kl_matrix(const SupportMatrix& t, const SupportMatrix& ref);

struct ObjectiveValue {
  double kl_plan = 0;      // KL(plan | kernel)
  double kl_marginal = 0;  // KL(column sums | v_tilde)
  double total = 0;        // kl_plan + gamma * kl_marginal
};

ObjectiveValue objective(const SupportMatrix& plan, const Kernel& kernel,
                         std::span<const double> v_tilde, double gamma);
ObjectiveValue objective(const ProblemInstance& inst, const SupportMatrix& plan);

// Residual of the rewrite of a linear cost term plus an entropic penalty
// against the ideal as a single KL term against the kernel entry
// k = t_tilde * exp(-c/gamma0):
//   c*t + gamma0*kl(t|t_tilde)  ==  gamma0*kl(t|k) - gamma0*k + gamma0*t_tilde
// Returns left minus right; |result| should be at machine-error scale.
double regularization_identity_residual(double c, double t, double t_tilde,
                                        double gamma0);

}  // namespace otz
