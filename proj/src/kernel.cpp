#include <cmath>
#include <string>

#include "otz/instance.hpp"

namespace otz {

Kernel build_kernel(const CostMatrix& cost, const DenseMatrix& ideal,
                    double gamma0,
                    std::shared_ptr<const ZeroPattern> pattern,
                    StorageLayout layout) {
  if (!pattern)
    throw Error(ErrorCode::InvalidArgument, "null pattern");
  if (!(gamma0 > 0))
    throw Error(ErrorCode::InvalidArgument, "gamma0 must be positive");
  const ZeroPattern& p = *pattern;
  if (cost.rows != p.rows() || cost.cols != p.cols())
    throw Error(ErrorCode::InvalidArgument, "cost dimensions do not match pattern");
  const bool have_ideal = !ideal.empty();
  if (have_ideal && (ideal.rows != p.rows() || ideal.cols != p.cols()))
    throw Error(ErrorCode::InvalidArgument, "ideal dimensions do not match pattern");

  Kernel k = SupportMatrix::zeros(std::move(pattern), layout);
  for (std::size_t pos = 0; pos < p.support_size(); ++pos) {
    const int i = p.support_row(pos), j = p.support_col(pos);
    const double t_tilde = have_ideal ? ideal.at(i, j) : 1.0;
    const double value = t_tilde * std::exp(-cost.at(i, j) / gamma0);
    if (value == 0.0)
      // A zero here would silently enlarge the forbidden set and the scaling
      // steps would never move the entry again.
      throw Error(ErrorCode::KernelUnderflow,
                  "kernel entry (" + std::to_string(i) + ", " +
                      std::to_string(j) +
                      ") underflows to zero; raise gamma0 or rescale costs");
    k.set_support_value(pos, value);
  }
  return k;
}

Prepared prepare(const ProblemInstance& inst, StorageLayout layout) {
  std::vector<Violation> violations = validate_instance(inst);
  if (!violations.empty()) throw ValidationError(std::move(violations));

  Prepared out;
  out.pattern = ZeroPattern::create(inst.m, inst.n, inst.zero_pattern);
  out.kernel = build_kernel(inst.cost, inst.ideal, inst.gamma0, out.pattern,
                            layout);
  out.ideal = inst.ideal.empty()
                  ? SupportMatrix::constant(out.pattern, 1.0, layout)
                  : SupportMatrix::from_dense(out.pattern, inst.ideal, layout);
  return out;
}

}  // namespace otz
