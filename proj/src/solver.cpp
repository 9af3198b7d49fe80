#include "otz/solver.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "otz/divergence.hpp"
#include "otz/reduce.hpp"

namespace otz {

const char* algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::Alg1: return "alg1";
    case Algorithm::Alg2: return "alg2";
    case Algorithm::SK: return "sk";
    case Algorithm::Chizat: return "chizat";
  }
  return "unknown";
}

const char* termination_name(Termination t) {
  switch (t) {
    case Termination::Converged: return "converged";
    case Termination::MaxIterations: return "max_iterations";
    case Termination::NumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

StopDecision stopping_check(const IterationMetrics& m,
                            const SolverConfig& cfg) {
  const bool scalings_settled = m.max_c1_dev < cfg.tol_scaling &&
                                m.max_c2_dev < cfg.tol_scaling;
  const bool plan_settled = m.sum_abs_delta < cfg.tol_delta * m.sum_t;
  return scalings_settled && plan_settled ? StopDecision::Converged
                                          : StopDecision::Continue;
}

namespace {

double max_abs_dev_from_one(const std::vector<double>& x) {
  double dev = 0.0;
  for (double xi : x) dev = std::max(dev, std::abs(xi - 1.0));
  return dev;
}

bool all_finite(const std::vector<double>& x) {
  return std::all_of(x.begin(), x.end(),
                     [](double v) { return std::isfinite(v); });
}

double max_rel_residual(const std::vector<double>& sums,
                        const std::vector<double>& target) {
  double r = 0.0;
  for (std::size_t i = 0; i < sums.size(); ++i)
    r = std::max(r, std::abs(sums[i] - target[i]) / target[i]);
  return r;
}

// Detects the persistent gap between the row-scaled and column-scaled phases
// that marks an infeasible exact-marginal problem: the relative column
// residual of the row-scaled phase settles (lag distance < 1e-10) at a value
// bounded away from zero (> 1e-6). Latches once the signature holds for 50
// consecutive iterations.
class InfeasibilityDetector {
 public:
  void observe(const std::vector<double>& phase_residual) {
    if (!prev_.empty() && prev_.size() == phase_residual.size()) {
      double lag_dist = 0.0, magnitude = 0.0;
      for (std::size_t j = 0; j < phase_residual.size(); ++j) {
        lag_dist = std::max(lag_dist, std::abs(phase_residual[j] - prev_[j]));
        magnitude = std::max(magnitude, std::abs(phase_residual[j]));
      }
      if (lag_dist < 1e-10 && magnitude > 1e-6)
        ++consecutive_;
      else
        consecutive_ = 0;
      if (consecutive_ >= 50) latched_ = true;
    }
    prev_ = phase_residual;
  }

  bool latched() const { return latched_; }

 private:
  std::vector<double> prev_;
  long consecutive_ = 0;
  bool latched_ = false;
};

struct Driver {
  const ProblemInstance& inst;
  const SolverConfig& cfg;
  Prepared prep;
  ScalingState state;
  std::vector<double> prev_t;  // support values of t(l-1)
  std::vector<double> prev_v;  // v(l-1)
  SolveReport report;
  double log_delta_denom = 0.0;
  bool have_denom = false;
  InfeasibilityDetector detector;
  bool detector_active = false;

  IterationMetrics last_finite_metrics;

  Driver(const ProblemInstance& instance, const SolverConfig& config)
      : inst(instance), cfg(config), prep(prepare(instance, config.layout)) {
    state.t = prep.kernel;  // T(0) = K
    state.v = inst.marginals.v_tilde;
    state.c1.assign(inst.m, 1.0);
    state.c2.assign(inst.n, 1.0);
    state.d1.assign(inst.m, 1.0);
    state.d2.assign(inst.n, 1.0);
    state.iteration = 0;
    prev_t = state.t.support_values();
    prev_v = state.v;
  }

  // Shared epilogue of one iteration: metrics, trace, stopping.
  // Returns true when the run should stop.
  bool finish_iteration(long l) {
    state.iteration = l;
    IterationMetrics& m = state.metrics;
    m.max_c1_dev = max_abs_dev_from_one(state.c1);
    m.max_c2_dev = max_abs_dev_from_one(state.c2);

    std::vector<double> cur = state.t.support_values();
    std::vector<double> diff(cur.size());
    for (std::size_t p = 0; p < cur.size(); ++p)
      diff[p] = std::abs(cur[p] - prev_t[p]);
    m.sum_abs_delta = pairwise_sum(diff.data(), diff.size());
    m.sum_t = pairwise_sum(cur.data(), cur.size());

    const bool finite = all_finite(state.c1) && all_finite(state.c2) &&
                        all_finite(state.v) && std::isfinite(m.sum_t) &&
                        support_all_finite(state.t);
    if (!finite) {
      // Roll back to the last finite iterate and report it.
      state.t = SupportMatrix::from_support_values(prep.pattern, prev_t,
                                                   cfg.layout);
      state.v = prev_v;
      state.metrics = last_finite_metrics;
      report.termination = Termination::NumericalFailure;
      report.iterations = l;
      return true;
    }
    prev_t = std::move(cur);
    prev_v = state.v;

    const std::vector<double> rs = row_sums(state.t);
    const std::vector<double> cs = col_sums(state.t);
    m.row_residual = max_rel_residual(rs, inst.marginals.u_tilde);
    m.col_residual = max_rel_residual(cs, inst.marginals.v_tilde);
    last_finite_metrics = m;

    if (!have_denom) {
      log_delta_denom = std::log(m.sum_abs_delta);
      have_denom = true;
    }
    if (cfg.trace_every > 0 && (l == 1 || l % cfg.trace_every == 0))
      push_trace(l);

    if (cfg.observer) cfg.observer(state);

    if (stopping_check(m, cfg) == StopDecision::Converged) {
      report.termination = Termination::Converged;
      report.iterations = l;
      return true;
    }
    if (l >= cfg.max_iter) {
      report.termination = Termination::MaxIterations;
      report.iterations = l;
      return true;
    }
    return false;
  }

  void push_trace(long l) {
    TraceRow row;
    row.iter = l;
    row.sum_abs_delta = state.metrics.sum_abs_delta;
    row.log_delta_normalized =
        std::log(state.metrics.sum_abs_delta) / log_delta_denom;
    row.max_c1_dev = state.metrics.max_c1_dev;
    row.max_c2_dev = state.metrics.max_c2_dev;
    row.objective_total =
        objective(state.t, prep.kernel, inst.marginals.v_tilde, inst.gamma)
            .total;
    row.row_residual = state.metrics.row_residual;
    row.col_residual = state.metrics.col_residual;
    report.trace.push_back(row);
  }

  SolveReport take_report() {
    report.final_metrics = state.metrics;
    report.suspected_infeasible = detector_active && detector.latched();
    // Final iterate always traced.
    if (!report.trace.empty() &&
        report.trace.back().iter != report.iterations &&
        report.termination != Termination::NumericalFailure)
      push_trace(report.iterations);
    report.plan = std::move(state.t);
    report.v_star = std::move(state.v);
    return std::move(report);
  }
};

// Row scaling toward u_tilde, damped column scaling toward the running
// relaxed marginal v. The two scalings are applied through the same
// primitives the projection module uses, so both produce identical floats.
SolveReport run_alg1(const ProblemInstance& inst, const SolverConfig& cfg) {
  Driver drv(inst, cfg);
  const double col_exp = inst.gamma / (1.0 + inst.gamma);
  const double v_exp = -1.0 / inst.gamma;
  for (long l = 1;; ++l) {
    const std::vector<double> rs = row_sums(drv.state.t);
    for (int i = 0; i < inst.m; ++i) {
      drv.state.c1[i] = inst.marginals.u_tilde[i] / rs[i];
      drv.state.d1[i] *= drv.state.c1[i];
    }
    scale_rows(drv.state.t, drv.state.c1);
    const std::vector<double> cs = col_sums(drv.state.t);
    for (int j = 0; j < inst.n; ++j) {
      drv.state.c2[j] = pow_pos(drv.state.v[j] / cs[j], col_exp);
      drv.state.d2[j] *= drv.state.c2[j];
    }
    scale_cols(drv.state.t, drv.state.c2);
    for (int j = 0; j < inst.n; ++j)
      drv.state.v[j] = pow_pos(drv.state.c2[j], v_exp) * drv.state.v[j];
    if (drv.finish_iteration(l)) break;
  }
  return drv.take_report();
}

// Kernel-form family: t(l) = d1 o K o d2 with configurable update exponents.
// row_exp == 1 with col_exp = g/(1+g) gives the d-form of run_alg1; col_exp
// == 1 gives classical alternate scaling; general (row_exp, col_exp) is the
// doubly-relaxed iteration.
struct KernelFormParams {
  double row_exp = 1.0;
  double col_exp = 1.0;
  bool track_v = false;        // maintain v = d2^(-1/gamma) * v_tilde
  bool detect_infeasible = false;
};

SolveReport run_kernel_form(const ProblemInstance& inst,
                            const SolverConfig& cfg,
                            const KernelFormParams& params) {
  Driver drv(inst, cfg);
  drv.detector_active = params.detect_infeasible;
  const ZeroPattern& p = *drv.prep.pattern;
  const Kernel& k = drv.prep.kernel;
  const double v_exp = -1.0 / inst.gamma;
  std::vector<double> d1_prev(drv.state.d1), d2_prev(drv.state.d2);
  std::vector<double> scratch, denom1(inst.m), denom2(inst.n);

  for (long l = 1;; ++l) {
    // d1 = (u / (K d2))^row_exp
    for (int i = 0; i < inst.m; ++i) {
      scratch.clear();
      for (std::size_t pos = p.row_begin(i); pos < p.row_end(i); ++pos)
        scratch.push_back(k.support_value(pos) *
                          drv.state.d2[p.support_col(pos)]);
      denom1[i] = pairwise_sum(scratch.data(), scratch.size());
    }
    for (int i = 0; i < inst.m; ++i) {
      const double ratio = inst.marginals.u_tilde[i] / denom1[i];
      drv.state.d1[i] =
          params.row_exp == 1.0 ? ratio : pow_pos(ratio, params.row_exp);
    }
    // d2 = (v_tilde / (d1^T K))^col_exp
    for (int j = 0; j < inst.n; ++j) {
      scratch.clear();
      for (std::size_t pos : p.col_support(j))
        scratch.push_back(drv.state.d1[p.support_row(pos)] *
                          k.support_value(pos));
      denom2[j] = pairwise_sum(scratch.data(), scratch.size());
    }
    if (params.detect_infeasible) {
      // Column residual of the row-scaled phase t^ = d1 o K o d2_old.
      std::vector<double> phase(inst.n);
      for (int j = 0; j < inst.n; ++j)
        phase[j] = drv.state.d2[j] * denom2[j] / inst.marginals.v_tilde[j] -
                   1.0;
      drv.detector.observe(phase);
    }
    for (int j = 0; j < inst.n; ++j) {
      const double ratio = inst.marginals.v_tilde[j] / denom2[j];
      drv.state.d2[j] =
          params.col_exp == 1.0 ? ratio : pow_pos(ratio, params.col_exp);
    }
    // t = d1 o K o d2
    for (std::size_t pos = 0; pos < p.support_size(); ++pos)
      drv.state.t.set_support_value(
          pos, drv.state.d1[p.support_row(pos)] * k.support_value(pos) *
                   drv.state.d2[p.support_col(pos)]);
    for (int i = 0; i < inst.m; ++i) {
      drv.state.c1[i] = drv.state.d1[i] / d1_prev[i];
      d1_prev[i] = drv.state.d1[i];
    }
    for (int j = 0; j < inst.n; ++j) {
      drv.state.c2[j] = drv.state.d2[j] / d2_prev[j];
      d2_prev[j] = drv.state.d2[j];
    }
    if (params.track_v)
      for (int j = 0; j < inst.n; ++j)
        drv.state.v[j] =
            pow_pos(drv.state.d2[j], v_exp) * inst.marginals.v_tilde[j];
    if (drv.finish_iteration(l)) break;
  }
  if (!params.track_v) {
    // v has no independent meaning here; report the achieved column sums.
    drv.state.v = col_sums(drv.state.t);
  }
  return drv.take_report();
}

}  // namespace

SolveReport solve_alg1(const ProblemInstance& inst, const SolverConfig& cfg) {
  return run_alg1(inst, cfg);
}

SolveReport solve_alg2(const ProblemInstance& inst, const SolverConfig& cfg) {
  KernelFormParams params;
  params.row_exp = 1.0;
  params.col_exp = inst.gamma / (1.0 + inst.gamma);
  params.track_v = true;
  return run_kernel_form(inst, cfg, params);
}

SolveReport solve_sk(const ProblemInstance& inst, const SolverConfig& cfg) {
  KernelFormParams params;
  params.row_exp = 1.0;
  params.col_exp = 1.0;
  params.detect_infeasible = true;
  return run_kernel_form(inst, cfg, params);
}

SolveReport solve_chizat(const ProblemInstance& inst,
                         const SolverConfig& cfg) {
  if (!inst.zero_pattern.empty())
    throw Error(ErrorCode::UnsupportedPattern,
                "this algorithm requires an empty zero pattern");
  if (!(cfg.gamma1 > 0) || !(cfg.gamma2 > 0))
    throw Error(ErrorCode::InvalidArgument,
                "gamma1 and gamma2 must be positive");
  KernelFormParams params;
  params.row_exp = cfg.gamma1 / (1.0 + cfg.gamma1);
  params.col_exp = cfg.gamma2 / (1.0 + cfg.gamma2);
  return run_kernel_form(inst, cfg, params);
}

SolveReport solve(const ProblemInstance& inst, const SolverConfig& cfg) {
  switch (cfg.algorithm) {
    case Algorithm::Alg1: return solve_alg1(inst, cfg);
    case Algorithm::Alg2: return solve_alg2(inst, cfg);
    case Algorithm::SK: return solve_sk(inst, cfg);
    case Algorithm::Chizat: return solve_chizat(inst, cfg);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown algorithm");
}

}  // namespace otz
