#include <cmath>
#include <string>

#include "otz/instance.hpp"

namespace otz {

namespace {

void check_dims(const ProblemInstance& inst, std::vector<Violation>& out) {
  const auto dim = [&](long index, const std::string& detail) {
    out.push_back({ViolationKind::DimensionMismatch, index, detail});
  };
  if (inst.m < 1 || inst.n < 1)
    dim(-1, "need m >= 1 and n >= 1, got m=" + std::to_string(inst.m) +
                " n=" + std::to_string(inst.n));
  if (long(inst.marginals.u_tilde.size()) != inst.m)
    dim(-1, "u_tilde has " + std::to_string(inst.marginals.u_tilde.size()) +
                " entries, expected m=" + std::to_string(inst.m));
  if (long(inst.marginals.v_tilde.size()) != inst.n)
    dim(-1, "v_tilde has " + std::to_string(inst.marginals.v_tilde.size()) +
                " entries, expected n=" + std::to_string(inst.n));
  if (inst.cost.rows != inst.m || inst.cost.cols != inst.n ||
      long(inst.cost.values.size()) !=
          long(inst.cost.rows) * long(inst.cost.cols))
    dim(-1, "cost is " + std::to_string(inst.cost.rows) + "x" +
                std::to_string(inst.cost.cols) + " with " +
                std::to_string(inst.cost.values.size()) + " values");
  if (!inst.ideal.empty() &&
      (inst.ideal.rows != inst.m || inst.ideal.cols != inst.n ||
       long(inst.ideal.values.size()) != long(inst.m) * long(inst.n)))
    dim(-1, "ideal plan is " + std::to_string(inst.ideal.rows) + "x" +
                std::to_string(inst.ideal.cols));
  if (!(inst.gamma0 > 0) || !std::isfinite(inst.gamma0))
    dim(-1, "gamma0 must be positive and finite");
  if (!(inst.gamma > 0) || !std::isfinite(inst.gamma))
    dim(-1, "gamma must be positive and finite");
}

void check_marginals(const ProblemInstance& inst, std::vector<Violation>& out) {
  for (std::size_t i = 0; i < inst.marginals.u_tilde.size(); ++i) {
    const double u = inst.marginals.u_tilde[i];
    if (!(u > 0) || !std::isfinite(u))
      out.push_back({ViolationKind::NonpositiveMarginal, long(i),
                     "u_tilde[" + std::to_string(i) + "] = " +
                         std::to_string(u)});
  }
  for (std::size_t j = 0; j < inst.marginals.v_tilde.size(); ++j) {
    const double v = inst.marginals.v_tilde[j];
    if (!(v > 0) || !std::isfinite(v))
      out.push_back({ViolationKind::NonpositiveMarginal, long(j),
                     "v_tilde[" + std::to_string(j) + "] = " +
                         std::to_string(v)});
  }
}

// Pattern range/duplicate defects surface as DimensionMismatch; coverage
// defects get their own kinds.
void check_pattern(const ProblemInstance& inst, std::vector<Violation>& out) {
  if (inst.m < 1 || inst.n < 1) return;
  std::shared_ptr<const ZeroPattern> pattern;
  try {
    pattern = ZeroPattern::create(inst.m, inst.n, inst.zero_pattern);
  } catch (const Error& e) {
    out.push_back({ViolationKind::DimensionMismatch, -1, e.what()});
    return;
  }
  for (int i : pattern->rows_without_support())
    out.push_back({ViolationKind::ZeroRowInPattern, i,
                   "row " + std::to_string(i) + " has no allowed entry"});
  for (int j : pattern->cols_without_support())
    out.push_back({ViolationKind::ZeroColumnInPattern, j,
                   "column " + std::to_string(j) + " has no allowed entry"});

  if (!inst.ideal.empty() && inst.ideal.rows == inst.m &&
      inst.ideal.cols == inst.n &&
      long(inst.ideal.values.size()) == long(inst.m) * long(inst.n)) {
    for (std::size_t pos = 0; pos < pattern->support_size(); ++pos) {
      const int i = pattern->support_row(pos), j = pattern->support_col(pos);
      const double t = inst.ideal.at(i, j);
      if (!(t > 0) || !std::isfinite(t))
        out.push_back({ViolationKind::NonpositiveIdealEntry,
                       long(i) * inst.n + j,
                       "ideal[" + std::to_string(i) + "][" +
                           std::to_string(j) + "] = " + std::to_string(t)});
    }
  }
}

}  // namespace

std::vector<Violation> validate_instance(const ProblemInstance& inst) {
  std::vector<Violation> out;
  check_dims(inst, out);
  check_marginals(inst, out);
  check_pattern(inst, out);
  return out;
}

}  // namespace otz
