#include "otz/divergence.hpp"

#include <cmath>
#include <string>

#include "otz/reduce.hpp"

namespace otz {

double kl_scalar(double t, double t_ref) {
  if (!(t >= 0))
    throw Error(ErrorCode::DomainError,
                "kl_scalar needs t >= 0, got " + std::to_string(t));
  if (!(t_ref > 0))
    throw Error(ErrorCode::DomainError,
                "kl_scalar needs t_ref > 0, got " + std::to_string(t_ref));
  if (t == 0.0) return t_ref;
  return t * std::log(t / t_ref) - t + t_ref;
}

double kl_matrix(const SupportMatrix& t, const SupportMatrix& ref) {
  if (!t.pattern() || !ref.pattern() ||
      !t.pattern()->same_structure(*ref.pattern()))
    throw Error(ErrorCode::PatternMismatch,
                "plan and reference have different zero patterns");
  std::vector<double> terms(t.support_size());
  for (std::size_t pos = 0; pos < terms.size(); ++pos)
    terms[pos] = kl_scalar(t.support_value(pos), ref.support_value(pos));
  return pairwise_sum(terms.data(), terms.size());
}

ObjectiveValue objective(const SupportMatrix& plan, const Kernel& kernel,
                         std::span<const double> v_tilde, double gamma) {
  ObjectiveValue out;
  out.kl_plan = kl_matrix(plan, kernel);
  std::vector<double> v_t = col_sums(plan);
  std::vector<double> terms(v_t.size());
  for (std::size_t j = 0; j < v_t.size(); ++j)
    terms[j] = kl_scalar(v_t[j], v_tilde[j]);
  out.kl_marginal = pairwise_sum(terms.data(), terms.size());
  out.total = out.kl_plan + gamma * out.kl_marginal;
  return out;
}

ObjectiveValue objective(const ProblemInstance& inst,
                         const SupportMatrix& plan) {
  Prepared prep = prepare(inst);
  if (!plan.pattern() || !plan.pattern()->same_structure(*prep.pattern))
    throw Error(ErrorCode::PatternMismatch,
                "plan does not match the instance's zero pattern");
  return objective(plan, prep.kernel, inst.marginals.v_tilde, inst.gamma);
}

double regularization_identity_residual(double c, double t, double t_tilde,
                                        double gamma0) {
  if (!std::isfinite(c))
    throw Error(ErrorCode::DomainError, "cost must be finite");
  if (!(t >= 0))
    throw Error(ErrorCode::DomainError, "t must be nonnegative");
  if (!(t_tilde > 0))
    throw Error(ErrorCode::DomainError, "t_tilde must be positive");
  if (!(gamma0 > 0))
    throw Error(ErrorCode::DomainError, "gamma0 must be positive");
  const double k = t_tilde * std::exp(-c / gamma0);
  if (k == 0.0)
    throw Error(ErrorCode::KernelUnderflow,
                "reference entry underflows to zero");
  const double left = c * t + gamma0 * kl_scalar(t, t_tilde);
  // Grouped so the t == 0 case cancels exactly: kl(0|k) = k.
  const double right =
      (gamma0 * kl_scalar(t, k) - gamma0 * k) + gamma0 * t_tilde;
  return left - right;
}

}  // namespace otz
