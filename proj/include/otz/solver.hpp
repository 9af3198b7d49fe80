#pragma once

#include <functional>
#include <vector>

#include "otz/instance.hpp"

namespace otz {

enum class Algorithm { Alg1, Alg2, SK, Chizat };
enum class Termination { Converged, MaxIterations, NumericalFailure };

const char* algorithm_name(Algorithm a);
const char* termination_name(Termination t);

// Metrics of one iteration, enough to replay the stopping rule from a trace.
struct IterationMetrics {
  double max_c1_dev = 0;       // max_i |c1_i - 1|
  double max_c2_dev = 0;       // max_j |c2_j - 1|
  double sum_abs_delta = 0;    // sum |t(l) - t(l-1)| over the support
  double sum_t = 0;            // sum t(l) over the support
  double row_residual = 0;     // max_i |row_sum_i - u_i| / u_i
  double col_residual = 0;     // max_j |col_sum_j - v_tilde_j| / v_tilde_j
};

// Live state of a scaling run, exposed to observers after each iteration.
// c are the per-iteration multiplicative updates, d their running products
// (d(l) = c(l) * d(l-1), d(0) = 1), so t(l) = d1 o kernel o d2 for the
// kernel-form algorithms.
struct ScalingState {
  TransportPlan t;
  std::vector<double> v;   // current relaxed column marginal
  std::vector<double> c1, c2, d1, d2;
  long iteration = 0;
  IterationMetrics metrics;
};

struct SolverConfig {
  Algorithm algorithm = Algorithm::Alg1;
  double tol_scaling = 1e-9;
  double tol_delta = 1e-12;
  long max_iter = 100000;
  double gamma1 = 1e6;  // row exponent weight (Chizat only)
  double gamma2 = 1.0;  // column exponent weight (Chizat only)
  long trace_every = 1;
  StorageLayout layout = StorageLayout::Auto;
  // Called after every iteration; for tests and lockstep comparisons.
  std::function<void(const ScalingState&)> observer;
};

struct TraceRow {
  long iter = 0;
  double sum_abs_delta = 0;
  double log_delta_normalized = 0;  // log(delta(l)) / log(delta(1))
  double max_c1_dev = 0;
  double max_c2_dev = 0;
  double objective_total = 0;
  double row_residual = 0;
  double col_residual = 0;
};

struct SolveReport {
  TransportPlan plan;
  std::vector<double> v_star;
  long iterations = 0;
  Termination termination = Termination::MaxIterations;
  bool suspected_infeasible = false;  // SK only: persistent two-phase gap
  IterationMetrics final_metrics;
  std::vector<TraceRow> trace;
};

// Row scaling enforcing row sums, then damped column scaling pulling column
// sums toward v_tilde, iterated from t(0) = kernel, v(0) = v_tilde. The
// column step uses exponent gamma/(1+gamma) and updates the relaxed marginal
// v(l+1) = c2^(-1/gamma) * v(l).
SolveReport solve_alg1(const ProblemInstance& inst, const SolverConfig& cfg);

// Same iterates computed in kernel form: d1 = u/(K d2),
// d2 = (v_tilde/(d1^T K))^(gamma/(1+gamma)), t = d1 o K o d2.
SolveReport solve_alg2(const ProblemInstance& inst, const SolverConfig& cfg);

// Classical alternate scaling enforcing both marginals exactly (column
// exponent 1). May not converge when no plan with exact marginals exists on
// the support; a persistent gap between the row-scaled and column-scaled
// phases is then recorded as suspected_infeasible.
SolveReport solve_sk(const ProblemInstance& inst, const SolverConfig& cfg);

// Damped scaling on both sides with exponents gamma1/(1+gamma1) and
// gamma2/(1+gamma2). Requires an empty zero pattern (UnsupportedPattern).
SolveReport solve_chizat(const ProblemInstance& inst, const SolverConfig& cfg);

SolveReport solve(const ProblemInstance& inst, const SolverConfig& cfg);

enum class StopDecision { Continue, Converged };

// Converged iff max_c1_dev < tol_scaling, max_c2_dev < tol_scaling and
// sum_abs_delta < tol_delta * sum_t.
StopDecision stopping_check(const IterationMetrics& metrics,
                            const SolverConfig& cfg);

}  // namespace otz
