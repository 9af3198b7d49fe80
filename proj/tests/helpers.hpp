#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "otz/instance.hpp"
#include "otz/scenarios.hpp"

namespace otz::testing {

inline ProblemInstance make_instance(int m, int n, std::vector<double> u,
                                     std::vector<double> v,
                                     std::vector<double> cost_flat,
                                     std::vector<IndexPair> pattern = {},
                                     double gamma0 = 1.0, double gamma = 1.0) {
  ProblemInstance inst;
  inst.m = m;
  inst.n = n;
  inst.marginals.u_tilde = std::move(u);
  inst.marginals.v_tilde = std::move(v);
  inst.cost.rows = m;
  inst.cost.cols = n;
  inst.cost.values = std::move(cost_flat);
  inst.zero_pattern = std::move(pattern);
  inst.gamma0 = gamma0;
  inst.gamma = gamma;
  return inst;
}

inline ProblemInstance random_instance(int m, int n, double density,
                                       unsigned long long seed,
                                       double gamma0 = 1.0,
                                       double gamma = 1.0) {
  RandomInstanceConfig cfg;
  cfg.m = m;
  cfg.n = n;
  cfg.zero_density = density;
  cfg.seed = seed;
  cfg.gamma0 = gamma0;
  cfg.gamma = gamma;
  return generate_random_instance(cfg);
}

inline double rel_diff(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

// Max entrywise relative difference over the shared support.
inline double max_rel_diff(const SupportMatrix& a, const SupportMatrix& b) {
  double worst = 0.0;
  for (std::size_t pos = 0; pos < a.support_size(); ++pos)
    worst = std::max(worst, rel_diff(a.support_value(pos),
                                     b.support_value(pos)));
  return worst;
}

}  // namespace otz::testing
