#include "otz/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "otz/divergence.hpp"
#include "otz/reduce.hpp"

namespace otz {

namespace {

struct UnionFind {
  std::vector<int> parent;

  explicit UnionFind(int n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }

  int find(int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }

  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[b] = a;
  }
};

// Conjugate gradient on the (singular, PSD) normal equations of the
// two-factor fit a_i + b_j ~ y_p over the support graph. The right-hand side
// is orthogonal to the constant-shift nullspace, so CG started from zero
// converges within the range. Touches support entries in canonical order
// only, so the result does not depend on the storage layout.
std::vector<double> solve_two_factor_ls(const ZeroPattern& p,
                                        const std::vector<double>& y) {
  const int m = p.rows(), n = p.cols();
  const std::size_t N = static_cast<std::size_t>(m + n);
  std::vector<double> deg(N, 0.0), rhs(N, 0.0);
  for (std::size_t pos = 0; pos < p.support_size(); ++pos) {
    const std::size_t r = static_cast<std::size_t>(p.support_row(pos));
    const std::size_t c = static_cast<std::size_t>(m + p.support_col(pos));
    deg[r] += 1.0;
    deg[c] += 1.0;
    rhs[r] += y[pos];
    rhs[c] += y[pos];
  }

  auto apply = [&](const std::vector<double>& x, std::vector<double>& out) {
    for (std::size_t q = 0; q < N; ++q) out[q] = deg[q] * x[q];
    for (std::size_t pos = 0; pos < p.support_size(); ++pos) {
      const std::size_t r = static_cast<std::size_t>(p.support_row(pos));
      const std::size_t c = static_cast<std::size_t>(m + p.support_col(pos));
      out[r] += x[c];
      out[c] += x[r];
    }
  };
  auto dot = [&](const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t q = 0; q < N; ++q) s += a[q] * b[q];
    return s;
  };

  std::vector<double> x(N, 0.0), r = rhs, d = rhs, Ld(N);
  const double rhs_norm2 = dot(rhs, rhs);
  if (rhs_norm2 == 0.0) return x;
  const double tol2 = 1e-30 * rhs_norm2;  // (1e-15 relative)^2
  double r_norm2 = rhs_norm2;
  const long max_iter = 50 * static_cast<long>(N) + 100;
  for (long it = 0; it < max_iter && r_norm2 > tol2; ++it) {
    apply(d, Ld);
    const double dLd = dot(d, Ld);
    if (!(dLd > 0)) break;
    const double alpha = r_norm2 / dLd;
    for (std::size_t q = 0; q < N; ++q) {
      x[q] += alpha * d[q];
      r[q] -= alpha * Ld[q];
    }
    const double r_next = dot(r, r);
    const double beta = r_next / r_norm2;
    r_norm2 = r_next;
    for (std::size_t q = 0; q < N; ++q) d[q] = r[q] + beta * d[q];
  }
  return x;
}

std::vector<double> row_gather(const ZeroPattern& p, const Kernel& k,
                               const std::vector<double>& d2) {
  std::vector<double> out(static_cast<std::size_t>(p.rows()));
  std::vector<double> scratch;
  for (int i = 0; i < p.rows(); ++i) {
    scratch.clear();
    for (std::size_t pos = p.row_begin(i); pos < p.row_end(i); ++pos)
      scratch.push_back(k.support_value(pos) * d2[p.support_col(pos)]);
    out[static_cast<std::size_t>(i)] =
        pairwise_sum(scratch.data(), scratch.size());
  }
  return out;
}

std::vector<double> col_gather(const ZeroPattern& p, const Kernel& k,
                               const std::vector<double>& d1) {
  std::vector<double> out(static_cast<std::size_t>(p.cols()));
  std::vector<double> scratch;
  for (int j = 0; j < p.cols(); ++j) {
    scratch.clear();
    for (std::size_t pos : p.col_support(j))
      scratch.push_back(d1[p.support_row(pos)] * k.support_value(pos));
    out[static_cast<std::size_t>(j)] =
        pairwise_sum(scratch.data(), scratch.size());
  }
  return out;
}

}  // namespace

OptimalityReport check_kkt(const ProblemInstance& inst,
                           const TransportPlan& plan,
                           std::span<const double> v_star) {
  const Prepared prep = prepare(inst);
  if (!plan.pattern()->same_structure(*prep.pattern))
    throw Error(ErrorCode::PatternMismatch,
                "plan support does not match the instance pattern");
  if (static_cast<int>(v_star.size()) != inst.n)
    throw Error(ErrorCode::InvalidArgument,
                "v_star length does not match instance columns");
  const ZeroPattern& p = *prep.pattern;
  const Kernel& k = prep.kernel;
  const int m = inst.m, n = inst.n;

  OptimalityReport rep;
  rep.min_support_entry = support_min(plan);
  rep.min_v_star = *std::min_element(v_star.begin(), v_star.end());
  rep.positivity_ok = rep.min_support_entry > 0;
  if (!rep.positivity_ok)
    throw Error(ErrorCode::DomainError,
                "plan must be strictly positive on the support");

  // Connected components of the bipartite support graph.
  UnionFind uf(m + n);
  for (std::size_t pos = 0; pos < p.support_size(); ++pos)
    uf.unite(p.support_row(pos), m + p.support_col(pos));
  std::vector<int> comp(static_cast<std::size_t>(m + n));
  std::vector<int> roots;
  for (int q = 0; q < m + n; ++q) {
    const int root = uf.find(q);
    auto it = std::find(roots.begin(), roots.end(), root);
    if (it == roots.end()) {
      roots.push_back(root);
      comp[static_cast<std::size_t>(q)] = static_cast<int>(roots.size()) - 1;
    } else {
      comp[static_cast<std::size_t>(q)] =
          static_cast<int>(it - roots.begin());
    }
  }
  rep.support_components = static_cast<int>(roots.size());

  // Least-squares split log(t/k) = log d1_i + log d2_j.
  std::vector<double> y(p.support_size());
  for (std::size_t pos = 0; pos < p.support_size(); ++pos)
    y[pos] = std::log(plan.support_value(pos) / k.support_value(pos));
  const std::vector<double> ab = solve_two_factor_ls(p, y);

  // d2 from the fit; d1 defined through the row relation, which therefore
  // holds by construction. The per-component scale left open by the fit is
  // pinned by least squares against the log column relation.
  std::vector<double> d2(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j)
    d2[static_cast<std::size_t>(j)] = std::exp(ab[static_cast<std::size_t>(m + j)]);
  const double col_exp = inst.gamma / (1.0 + inst.gamma);

  {
    std::vector<double> R = row_gather(p, k, d2);
    std::vector<double> d1(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i)
      d1[static_cast<std::size_t>(i)] =
          inst.marginals.u_tilde[static_cast<std::size_t>(i)] /
          R[static_cast<std::size_t>(i)];
    std::vector<double> S = col_gather(p, k, d1);
    std::vector<double> shift_sum(static_cast<std::size_t>(rep.support_components), 0.0);
    std::vector<double> shift_cnt(static_cast<std::size_t>(rep.support_components), 0.0);
    for (int j = 0; j < n; ++j) {
      const double e = std::log(d2[static_cast<std::size_t>(j)]) -
                       col_exp * (std::log(inst.marginals.v_tilde[static_cast<std::size_t>(j)]) -
                                  std::log(S[static_cast<std::size_t>(j)]));
      const std::size_t c = static_cast<std::size_t>(comp[static_cast<std::size_t>(m + j)]);
      shift_sum[c] += e;
      shift_cnt[c] += 1.0;
    }
    for (int j = 0; j < n; ++j) {
      const std::size_t c = static_cast<std::size_t>(comp[static_cast<std::size_t>(m + j)]);
      const double beta = -(1.0 + inst.gamma) * shift_sum[c] / shift_cnt[c];
      d2[static_cast<std::size_t>(j)] *= std::exp(beta);
    }
  }

  const std::vector<double> R = row_gather(p, k, d2);
  std::vector<double> d1(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i)
    d1[static_cast<std::size_t>(i)] =
        inst.marginals.u_tilde[static_cast<std::size_t>(i)] /
        R[static_cast<std::size_t>(i)];
  const std::vector<double> S = col_gather(p, k, d1);

  double fp = 0.0;
  for (int i = 0; i < m; ++i) {
    const double u = inst.marginals.u_tilde[static_cast<std::size_t>(i)];
    fp = std::max(fp, std::abs(d1[static_cast<std::size_t>(i)] *
                                   R[static_cast<std::size_t>(i)] -
                               u) /
                          u);
  }
  for (int j = 0; j < n; ++j) {
    const double target =
        pow_pos(inst.marginals.v_tilde[static_cast<std::size_t>(j)] /
                    S[static_cast<std::size_t>(j)],
                col_exp);
    fp = std::max(fp, std::abs(d2[static_cast<std::size_t>(j)] - target) /
                          d2[static_cast<std::size_t>(j)]);
  }
  for (std::size_t pos = 0; pos < p.support_size(); ++pos) {
    const double fit = d1[static_cast<std::size_t>(p.support_row(pos))] *
                       k.support_value(pos) *
                       d2[static_cast<std::size_t>(p.support_col(pos))];
    fp = std::max(fp, std::abs(plan.support_value(pos) - fit) /
                          plan.support_value(pos));
  }
  rep.fixed_point_residual = fp;

  const std::vector<double> rs = row_sums(plan);
  double rr = 0.0;
  for (int i = 0; i < m; ++i) {
    const double u = inst.marginals.u_tilde[static_cast<std::size_t>(i)];
    rr = std::max(rr, std::abs(rs[static_cast<std::size_t>(i)] - u) / u);
  }
  rep.row_residual = rr;

  const double sum_u = pairwise_sum(inst.marginals.u_tilde.data(),
                                    inst.marginals.u_tilde.size());
  const double sum_v = pairwise_sum(v_star.data(), v_star.size());
  rep.balance_residual = std::abs(sum_v - sum_u) / sum_u;
  return rep;
}

bool check_positivity(const DenseMatrix& plan, const ZeroPattern& pattern) {
  if (plan.rows != pattern.rows() || plan.cols != pattern.cols())
    throw Error(ErrorCode::InvalidArgument,
                "plan dimensions do not match the pattern");
  for (int i = 0; i < plan.rows; ++i)
    for (int j = 0; j < plan.cols; ++j) {
      const double t = plan.at(i, j);
      if (pattern.is_forbidden(i, j)) {
        if (t != 0.0) return false;
      } else {
        if (!(t > 0) || !std::isfinite(t)) return false;
      }
    }
  return true;
}

OptimalityReport check_limit_properties(const SolveReport& report,
                                        const ProblemInstance& inst) {
  if (report.termination != Termination::Converged)
    throw Error(ErrorCode::InvalidArgument,
                "limit properties require a converged run");
  OptimalityReport rep;
  rep.fixed_point_residual = std::numeric_limits<double>::quiet_NaN();

  const std::vector<double> rs = row_sums(report.plan);
  double rr = 0.0;
  for (int i = 0; i < inst.m; ++i) {
    const double u = inst.marginals.u_tilde[static_cast<std::size_t>(i)];
    rr = std::max(rr, std::abs(rs[static_cast<std::size_t>(i)] - u) / u);
  }
  rep.row_residual = rr;

  const double sum_u = pairwise_sum(inst.marginals.u_tilde.data(),
                                    inst.marginals.u_tilde.size());
  const double sum_v =
      pairwise_sum(report.v_star.data(), report.v_star.size());
  rep.balance_residual = std::abs(sum_v - sum_u) / sum_u;

  rep.min_support_entry = support_min(report.plan);
  rep.min_v_star =
      *std::min_element(report.v_star.begin(), report.v_star.end());
  rep.positivity_ok = rep.min_support_entry > 0;

  UnionFind uf(inst.m + inst.n);
  const ZeroPattern& p = *report.plan.pattern();
  for (std::size_t pos = 0; pos < p.support_size(); ++pos)
    uf.unite(p.support_row(pos), inst.m + p.support_col(pos));
  std::vector<int> roots;
  for (int q = 0; q < inst.m + inst.n; ++q) {
    const int root = uf.find(q);
    if (std::find(roots.begin(), roots.end(), root) == roots.end())
      roots.push_back(root);
  }
  rep.support_components = static_cast<int>(roots.size());
  return rep;
}

OptimalityReport check_solution(const ProblemInstance& inst,
                                const DenseMatrix& plan,
                                std::span<const double> v_star) {
  const Prepared prep = prepare(inst);
  if (plan.rows != inst.m || plan.cols != inst.n)
    throw Error(ErrorCode::InvalidArgument,
                "plan dimensions do not match the instance");
  const bool positive = check_positivity(plan, *prep.pattern);
  if (!positive) {
    OptimalityReport rep;
    rep.positivity_ok = false;
    rep.min_v_star =
        v_star.empty() ? 0.0
                       : *std::min_element(v_star.begin(), v_star.end());
    rep.fixed_point_residual = std::numeric_limits<double>::infinity();
    double mn = std::numeric_limits<double>::infinity();
    for (int i = 0; i < plan.rows; ++i)
      for (int j = 0; j < plan.cols; ++j)
        if (!prep.pattern->is_forbidden(i, j))
          mn = std::min(mn, plan.at(i, j));
    rep.min_support_entry = mn;
    const std::vector<double> rs = [&] {
      std::vector<double> out(static_cast<std::size_t>(plan.rows), 0.0);
      for (int i = 0; i < plan.rows; ++i)
        for (int j = 0; j < plan.cols; ++j)
          out[static_cast<std::size_t>(i)] += plan.at(i, j);
      return out;
    }();
    double rr = 0.0;
    for (int i = 0; i < inst.m; ++i) {
      const double u = inst.marginals.u_tilde[static_cast<std::size_t>(i)];
      rr = std::max(rr, std::abs(rs[static_cast<std::size_t>(i)] - u) / u);
    }
    rep.row_residual = rr;
    const double sum_u = pairwise_sum(inst.marginals.u_tilde.data(),
                                      inst.marginals.u_tilde.size());
    const double sum_v = pairwise_sum(v_star.data(), v_star.size());
    rep.balance_residual = std::abs(sum_v - sum_u) / sum_u;
    return rep;
  }
  const TransportPlan support_plan =
      SupportMatrix::from_dense(prep.pattern, plan);
  return check_kkt(inst, support_plan, v_star);
}

namespace {

// Objective used by the reference minimizer: evaluated entrywise from
// kl_scalar, with the column sums recomputed per candidate. Deliberately
// avoids the iterative machinery.
double oracle_objective(const ProblemInstance& inst, const Prepared& prep,
                        const std::vector<double>& support_values) {
  const ZeroPattern& p = *prep.pattern;
  std::vector<double> terms(p.support_size());
  for (std::size_t pos = 0; pos < p.support_size(); ++pos)
    terms[pos] =
        kl_scalar(support_values[pos], prep.kernel.support_value(pos));
  const double kl_plan = pairwise_sum(terms.data(), terms.size());

  std::vector<double> colsum(static_cast<std::size_t>(inst.n), 0.0);
  for (std::size_t pos = 0; pos < p.support_size(); ++pos)
    colsum[static_cast<std::size_t>(p.support_col(pos))] +=
        support_values[pos];
  std::vector<double> vterms(static_cast<std::size_t>(inst.n));
  for (int j = 0; j < inst.n; ++j)
    vterms[static_cast<std::size_t>(j)] =
        kl_scalar(colsum[static_cast<std::size_t>(j)],
                  inst.marginals.v_tilde[static_cast<std::size_t>(j)]);
  return kl_plan +
         inst.gamma * pairwise_sum(vterms.data(), vterms.size());
}

}  // namespace

TransportPlan oracle_minimize(const ProblemInstance& inst) {
  const Prepared prep = prepare(inst);
  const ZeroPattern& p = *prep.pattern;
  const int m = inst.m, n = inst.n;
  if (m * n > 12 || m * n - m > 4)
    throw Error(ErrorCode::TooLarge,
                "reference minimizer accepts m*n <= 12 with m*n - m <= 4");

  // Eliminate the first support entry of each row: its value is the row
  // budget minus the free entries of that row, so row sums hold exactly.
  std::vector<std::size_t> free_pos;      // canonical positions of free entries
  std::vector<int> free_row;              // owning row of each free entry
  for (int i = 0; i < m; ++i)
    for (std::size_t pos = p.row_begin(i) + 1; pos < p.row_end(i); ++pos) {
      free_pos.push_back(pos);
      free_row.push_back(i);
    }
  const std::size_t f = free_pos.size();

  std::vector<double> values(p.support_size(), 0.0);
  auto materialize = [&](const std::vector<double>& x) -> bool {
    for (int i = 0; i < m; ++i)
      values[p.row_begin(i)] =
          inst.marginals.u_tilde[static_cast<std::size_t>(i)];
    for (std::size_t q = 0; q < f; ++q) {
      values[free_pos[q]] = x[q];
      values[p.row_begin(free_row[q])] -= x[q];
    }
    for (int i = 0; i < m; ++i)
      if (values[p.row_begin(i)] < 0) return false;
    return true;
  };
  auto eval = [&](const std::vector<double>& x) {
    if (!materialize(x))
      return std::numeric_limits<double>::infinity();
    return oracle_objective(inst, prep, values);
  };

  // Stage 1: dense scan on a 64-point grid per free entry.
  std::vector<double> best_x(f, 0.0), x(f, 0.0);
  double best_f = std::numeric_limits<double>::infinity();
  if (f == 0) {
    best_f = eval(best_x);
  } else {
    std::vector<int> digit(f, 0);
    for (;;) {
      for (std::size_t q = 0; q < f; ++q)
        x[q] = (digit[q] + 0.5) / 64.0 *
               inst.marginals.u_tilde[static_cast<std::size_t>(free_row[q])];
      const double fx = eval(x);
      if (fx < best_f) {
        best_f = fx;
        best_x = x;
      }
      std::size_t q = 0;
      while (q < f && ++digit[q] == 64) digit[q++] = 0;
      if (q == f) break;
    }
  }

  // Stage 2: cyclic golden-section refinement of each free entry over
  // [0, current value + current row slack].
  const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
  auto line_min = [&](std::size_t q) {
    std::vector<double> trial = best_x;
    materialize(best_x);
    const double slack = values[p.row_begin(free_row[q])];
    double a = 0.0, b = best_x[q] + slack;
    const double width_tol =
        1e-12 *
        (1.0 + inst.marginals.u_tilde[static_cast<std::size_t>(free_row[q])]);
    double x1 = b - golden * (b - a), x2 = a + golden * (b - a);
    trial[q] = x1;
    double f1 = eval(trial);
    trial[q] = x2;
    double f2 = eval(trial);
    while (b - a > width_tol) {
      if (f1 <= f2) {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - golden * (b - a);
        trial[q] = x1;
        f1 = eval(trial);
      } else {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + golden * (b - a);
        trial[q] = x2;
        f2 = eval(trial);
      }
    }
    trial[q] = 0.5 * (a + b);
    const double ft = eval(trial);
    if (ft < best_f) {
      best_f = ft;
      best_x = trial;
    }
  };
  for (int pass = 0; pass < 500 && f > 0; ++pass) {
    const double before = best_f;
    for (std::size_t q = 0; q < f; ++q) line_min(q);
    if (before - best_f < 1e-14 * (1.0 + std::abs(best_f))) break;
  }

  materialize(best_x);
  return SupportMatrix::from_support_values(prep.pattern, values);
}

}  // namespace otz
