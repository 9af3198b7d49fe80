#pragma once

#include <optional>
#include <string>
#include <vector>

#include "otz/instance.hpp"
#include "otz/solver.hpp"

namespace otz {

// Instance files are JSON objects with exactly these fields:
//   m, n            dimensions
//   u_tilde         array of m positive reals
//   v_tilde         array of n positive reals
//   cost            array of m rows of n reals, or array of [i, j, c] triples
//   zero_pattern    array of [i, j] pairs
//   ideal_plan      optional, same shapes as cost; default all-ones off the
//                   pattern; entries on the pattern must be absent or zero
//   gamma0, gamma   positive reals
// Unknown fields are rejected. Numbers are written as shortest round-trip
// decimals, so write-then-read reproduces an instance bit for bit.
ProblemInstance parse_instance(const std::string& json_text);
ProblemInstance read_instance(const std::string& path);
std::string instance_to_json(const ProblemInstance& inst);
void write_instance(const ProblemInstance& inst, const std::string& path);

// Solver output: plan (dense rows or sparse [i, j, v] triples), the relaxed
// column marginal v_star, and a summary of the run. Round-trips bit for bit.
struct SolutionData {
  int m = 0, n = 0;
  std::string algorithm;  // "alg1", "alg2", "sk", "chizat", "oracle"
  Termination termination = Termination::Converged;
  bool suspected_infeasible = false;
  long iterations = 0;
  std::optional<IterationMetrics> residuals;
  std::vector<double> v_star;
  DenseMatrix plan;
};

SolutionData solution_from_report(const SolveReport& report,
                                  const std::string& algorithm);
std::string solution_to_json(const SolutionData& sol, bool dense_format);
void write_solution(const SolutionData& sol, const std::string& path,
                    bool dense_format);
SolutionData parse_solution(const std::string& json_text);
SolutionData read_solution(const std::string& path);

// CSV with header iter,sum_abs_delta,log_delta_normalized,max_c1_dev,
// max_c2_dev,objective_total,row_residual,col_residual.
std::string trace_to_csv(const std::vector<TraceRow>& trace);
void write_trace_csv(const std::vector<TraceRow>& trace,
                     const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

// Shortest decimal that parses back to exactly x (to_chars); "nan"/"inf" for
// non-finite values.
std::string format_double(double x);

}  // namespace otz
