#pragma once

#include <memory>
#include <vector>

#include "otz/errors.hpp"
#include "otz/matrix.hpp"

namespace otz {

struct Marginals {
  std::vector<double> u_tilde;  // required row sums, length m
  std::vector<double> v_tilde;  // desired column sums, length n
};

using TransportPlan = SupportMatrix;
using Kernel = SupportMatrix;

// Full problem input: move masses u_tilde from m sources to n targets at unit
// costs `cost`, with the entries in `zero_pattern` pinned to zero, staying
// close to the ideal plan. Row sums are enforced exactly; column sums are
// pulled toward v_tilde with weight `gamma`. Plain data -- construct freely,
// then validate_instance() reports defects and prepare() builds the derived
// structures.
struct ProblemInstance {
  int m = 0, n = 0;
  Marginals marginals;
  CostMatrix cost;                      // entries on the zero pattern ignored
  std::vector<IndexPair> zero_pattern;
  DenseMatrix ideal;                    // empty: all-ones off the pattern
  double gamma0 = 1.0;                  // entropic smoothing constant
  double gamma = 1.0;                   // column-marginal relaxation weight
};

// Checks every type invariant and reports all violations found (an empty
// result means the instance is valid): positive marginals, consistent
// dimensions, in-range non-duplicate pattern entries, every row and column
// keeping at least one allowed entry, positive ideal entries off the pattern.
std::vector<Violation> validate_instance(const ProblemInstance& inst);

// k_ij = ideal_ij * exp(-cost_ij / gamma0) off the pattern, 0 on it.
// An off-pattern entry that underflows to zero is an error (KernelUnderflow):
// every later scaling step would silently treat it as forbidden.
Kernel build_kernel(const CostMatrix& cost, const DenseMatrix& ideal,
                    double gamma0,
                    std::shared_ptr<const ZeroPattern> pattern,
                    StorageLayout layout = StorageLayout::Auto);

struct Prepared {
  std::shared_ptr<const ZeroPattern> pattern;
  Kernel kernel;
  SupportMatrix ideal;
};

// Validates (throws ValidationError) and builds pattern + kernel + ideal.
Prepared prepare(const ProblemInstance& inst,
                 StorageLayout layout = StorageLayout::Auto);

}  // namespace otz
