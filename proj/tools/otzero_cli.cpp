// Command-line front end. Talks to the library exclusively through the
// C interface in otzero.h; errors are reported as one JSON object on stderr.
#include <cstdio>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "otzero.h"

namespace {

using njson = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitNumericalFailure = 2;
constexpr int kExitMaxIterations = 3;

void emit_error(const std::string& status, const std::string& message) {
  njson err;
  err["error"]["status"] = status;
  err["error"]["message"] = message;
  std::cerr << err.dump() << "\n";
}

int fail(otz_status s) {
  emit_error(otz_status_name(s), otz_last_error());
  return kExitError;
}

struct InstanceHandle {
  otz_instance* ptr = nullptr;
  ~InstanceHandle() { otz_instance_free(ptr); }
};

struct SolutionHandle {
  otz_solution* ptr = nullptr;
  ~SolutionHandle() { otz_solution_free(ptr); }
};

// Flags shared by the commands that run a solver.
struct SolveFlags {
  std::string algorithm = "alg1";
  double tol_scaling = 1e-9;
  double tol_delta = 1e-12;
  long max_iter = 100000;
  double gamma1 = 1e6;
  double gamma2 = 1.0;
  std::string format = "sparse";
  std::string out;
  std::string trace;
};

void add_solver_flags(CLI::App* cmd, SolveFlags& f) {
  cmd->add_option("--algorithm", f.algorithm, "Solver variant")
      ->check(CLI::IsMember({"alg1", "alg2", "sk", "chizat"}));
  cmd->add_option("--tol-scaling", f.tol_scaling,
                  "Scaling-factor deviation tolerance");
  cmd->add_option("--tol-delta", f.tol_delta,
                  "Relative plan-change tolerance");
  cmd->add_option("--max-iter", f.max_iter, "Iteration budget");
  cmd->add_option("--gamma1", f.gamma1, "chizat row exponent weight");
  cmd->add_option("--gamma2", f.gamma2, "chizat column exponent weight");
  cmd->add_option("--format", f.format, "Plan layout in output files")
      ->check(CLI::IsMember({"dense", "sparse"}));
  cmd->add_option("--out", f.out, "Write the solution to this path");
  cmd->add_option("--trace", f.trace,
                  "Write per-iteration metrics to this CSV path");
}

otz_algorithm algorithm_from_name(const std::string& name) {
  static const std::map<std::string, otz_algorithm> table = {
      {"alg1", OTZ_ALG1},
      {"alg2", OTZ_ALG2},
      {"sk", OTZ_SK},
      {"chizat", OTZ_CHIZAT}};
  return table.at(name);
}

otz_solver_options options_from_flags(const SolveFlags& f) {
  otz_solver_options opt;
  otz_solver_options_init(&opt);
  opt.algorithm = algorithm_from_name(f.algorithm);
  opt.tol_scaling = f.tol_scaling;
  opt.tol_delta = f.tol_delta;
  opt.max_iter = f.max_iter;
  opt.gamma1 = f.gamma1;
  opt.gamma2 = f.gamma2;
  return opt;
}

njson summary_of(const otz_solution* sol) {
  njson s;
  s["termination"] =
      sol ? std::string(
                otz_solution_termination(sol) == OTZ_TERM_CONVERGED
                    ? "converged"
                    : otz_solution_termination(sol) == OTZ_TERM_MAX_ITERATIONS
                          ? "max_iterations"
                          : "numerical_failure")
          : "unknown";
  s["iterations"] = otz_solution_iterations(sol);
  s["suspected_infeasible"] = otz_solution_suspected_infeasible(sol) != 0;
  return s;
}

// Writes whatever output was requested and maps the termination to the
// process exit code. On a numerical failure no solution file is written;
// the trace (ending at the last finite iterate) still is.
int emit_solution(otz_solution* sol, const SolveFlags& f,
                  bool print_full_when_no_out) {
  const otz_termination term = otz_solution_termination(sol);
  const bool dense = f.format == "dense";
  int code = kExitOk;
  if (term == OTZ_TERM_MAX_ITERATIONS) code = kExitMaxIterations;
  if (term == OTZ_TERM_NUMERICAL_FAILURE) code = kExitNumericalFailure;

  if (!f.trace.empty()) {
    const otz_status s = otz_solution_write_trace(sol, f.trace.c_str());
    if (s != OTZ_OK) return fail(s);
  }
  if (code != kExitNumericalFailure && !f.out.empty()) {
    const otz_status s = otz_solution_write(sol, f.out.c_str(), dense ? 1 : 0);
    if (s != OTZ_OK) return fail(s);
  }
  if (code != kExitNumericalFailure && f.out.empty() &&
      print_full_when_no_out) {
    char* text = nullptr;
    const otz_status s = otz_solution_to_json(sol, dense ? 1 : 0, &text);
    if (s != OTZ_OK) return fail(s);
    std::cout << text;
    otz_string_free(text);
  } else {
    std::cout << summary_of(sol).dump() << "\n";
  }
  if (code == kExitMaxIterations)
    emit_error("max_iterations",
               otz_solution_suspected_infeasible(sol)
                   ? "iteration budget exhausted; the iterates look like an "
                     "infeasible exact-marginal problem"
                   : "iteration budget exhausted before convergence");
  if (code == kExitNumericalFailure)
    emit_error("numerical_failure",
               "iterates left the finite range; rolled back to the last "
               "finite iterate");
  return code;
}

int run_solve(const std::string& instance_path, const SolveFlags& flags,
              const double* gamma_override, const double* gamma0_override) {
  InstanceHandle inst;
  otz_status s = otz_instance_read(instance_path.c_str(), &inst.ptr);
  if (s != OTZ_OK) return fail(s);
  if (gamma_override) {
    s = otz_instance_set_gamma(inst.ptr, *gamma_override);
    if (s != OTZ_OK) return fail(s);
  }
  if (gamma0_override) {
    s = otz_instance_set_gamma0(inst.ptr, *gamma0_override);
    if (s != OTZ_OK) return fail(s);
  }
  const otz_solver_options opt = options_from_flags(flags);
  SolutionHandle sol;
  s = otz_solve(inst.ptr, &opt, &sol.ptr);
  if (s != OTZ_OK) return fail(s);
  return emit_solution(sol.ptr, flags, true);
}

std::string with_run_suffix(const std::string& path, int run) {
  const std::size_t slash = path.find_last_of('/');
  const std::size_t dot = path.find_last_of('.');
  const std::string suffix = "_run" + std::to_string(run);
  if (dot == std::string::npos ||
      (slash != std::string::npos && dot < slash))
    return path + suffix;
  return path.substr(0, dot) + suffix + path.substr(dot);
}

int run_simulate_ev(int m, int n, unsigned long long seed, int runs,
                    double gamma0, double gamma, const SolveFlags& flags) {
  int worst = kExitOk;
  for (int run = 0; run < runs; ++run) {
    const unsigned long long run_seed = seed + static_cast<unsigned>(run);
    InstanceHandle inst;
    otz_status s =
        otz_generate_ev(m, n, run_seed, gamma0, gamma, &inst.ptr);
    if (s != OTZ_OK) return fail(s);
    const otz_solver_options opt = options_from_flags(flags);
    SolutionHandle sol;
    s = otz_solve(inst.ptr, &opt, &sol.ptr);
    if (s != OTZ_OK) return fail(s);

    SolveFlags run_flags = flags;
    if (runs > 1) {
      if (!run_flags.out.empty())
        run_flags.out = with_run_suffix(run_flags.out, run);
      if (!run_flags.trace.empty())
        run_flags.trace = with_run_suffix(run_flags.trace, run);
    }
    njson line = summary_of(sol.ptr);
    line["run"] = run;
    line["seed"] = run_seed;

    const otz_termination term = otz_solution_termination(sol.ptr);
    int code = kExitOk;
    if (term == OTZ_TERM_MAX_ITERATIONS) code = kExitMaxIterations;
    if (term == OTZ_TERM_NUMERICAL_FAILURE) code = kExitNumericalFailure;
    if (!run_flags.trace.empty()) {
      s = otz_solution_write_trace(sol.ptr, run_flags.trace.c_str());
      if (s != OTZ_OK) return fail(s);
    }
    if (code != kExitNumericalFailure && !run_flags.out.empty()) {
      s = otz_solution_write(sol.ptr, run_flags.out.c_str(),
                             run_flags.format == "dense" ? 1 : 0);
      if (s != OTZ_OK) return fail(s);
    }
    std::cout << line.dump() << "\n";
    if (code == kExitNumericalFailure ||
        (code == kExitMaxIterations && worst != kExitNumericalFailure))
      worst = code;
  }
  if (worst == kExitMaxIterations)
    emit_error("max_iterations",
               "at least one run exhausted its iteration budget");
  if (worst == kExitNumericalFailure)
    emit_error("numerical_failure",
               "at least one run left the finite range");
  return worst;
}

int run_check(const std::string& instance_path, const std::string& plan_path,
              double tol, const double* gamma_override,
              const double* gamma0_override) {
  InstanceHandle inst;
  otz_status s = otz_instance_read(instance_path.c_str(), &inst.ptr);
  if (s != OTZ_OK) return fail(s);
  if (gamma_override) {
    s = otz_instance_set_gamma(inst.ptr, *gamma_override);
    if (s != OTZ_OK) return fail(s);
  }
  if (gamma0_override) {
    s = otz_instance_set_gamma0(inst.ptr, *gamma0_override);
    if (s != OTZ_OK) return fail(s);
  }
  SolutionHandle sol;
  s = otz_solution_read(plan_path.c_str(), &sol.ptr);
  if (s != OTZ_OK) return fail(s);
  if (otz_solution_rows(sol.ptr) != otz_instance_rows(inst.ptr) ||
      otz_solution_cols(sol.ptr) != otz_instance_cols(inst.ptr)) {
    emit_error("argument", "plan dimensions do not match the instance");
    return kExitError;
  }
  otz_optimality rep;
  s = otz_check_solution(inst.ptr, sol.ptr, &rep);
  if (s != OTZ_OK) return fail(s);

  const bool pass = rep.positivity_ok != 0 && rep.min_v_star > 0 &&
                    rep.fixed_point_residual <= tol &&
                    rep.row_residual <= tol && rep.balance_residual <= tol;
  njson out;
  out["fixed_point_residual"] = rep.fixed_point_residual;
  out["row_residual"] = rep.row_residual;
  out["balance_residual"] = rep.balance_residual;
  out["min_support_entry"] = rep.min_support_entry;
  out["min_v_star"] = rep.min_v_star;
  out["positivity_ok"] = rep.positivity_ok != 0;
  out["support_components"] = rep.support_components;
  out["tol"] = tol;
  out["pass"] = pass;
  std::cout << out.dump() << "\n";
  if (!pass) {
    emit_error("check_failed",
               "plan does not satisfy the optimality conditions at the "
               "requested tolerance");
    return kExitError;
  }
  return kExitOk;
}

int run_oracle(const std::string& instance_path, const SolveFlags& flags,
               const double* gamma_override, const double* gamma0_override) {
  InstanceHandle inst;
  otz_status s = otz_instance_read(instance_path.c_str(), &inst.ptr);
  if (s != OTZ_OK) return fail(s);
  if (gamma_override) {
    s = otz_instance_set_gamma(inst.ptr, *gamma_override);
    if (s != OTZ_OK) return fail(s);
  }
  if (gamma0_override) {
    s = otz_instance_set_gamma0(inst.ptr, *gamma0_override);
    if (s != OTZ_OK) return fail(s);
  }
  SolutionHandle sol;
  s = otz_oracle_solve(inst.ptr, &sol.ptr);
  if (s != OTZ_OK) return fail(s);
  const bool dense = flags.format == "dense";
  if (!flags.out.empty()) {
    s = otz_solution_write(sol.ptr, flags.out.c_str(), dense ? 1 : 0);
    if (s != OTZ_OK) return fail(s);
    std::cout << summary_of(sol.ptr).dump() << "\n";
  } else {
    char* text = nullptr;
    s = otz_solution_to_json(sol.ptr, dense ? 1 : 0, &text);
    if (s != OTZ_OK) return fail(s);
    std::cout << text;
    otz_string_free(text);
  }
  return kExitOk;
}

int run_feasibility(const std::string& instance_path) {
  InstanceHandle inst;
  otz_status s = otz_instance_read(instance_path.c_str(), &inst.ptr);
  if (s != OTZ_OK) return fail(s);
  int feasible = 0;
  s = otz_check_feasibility(inst.ptr, &feasible);
  if (s != OTZ_OK) return fail(s);
  njson out;
  out["feasible"] = feasible != 0;
  std::cout << out.dump() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entropy-regularized transport plans with forbidden entries"};
  app.require_subcommand(1);

  std::string instance_path, plan_path;
  SolveFlags solve_flags, ev_flags, oracle_flags;
  double gamma = 0, gamma0 = 0, check_tol = 1e-6;
  int ev_m = 10000, ev_n = 10, ev_runs = 1;
  unsigned long long ev_seed = 1;
  double ev_gamma0 = 1.99, ev_gamma = 1.005;

  CLI::App* solve = app.add_subcommand(
      "solve", "Solve an instance read from --instance");
  solve->add_option("--instance", instance_path, "Instance JSON path")
      ->required();
  add_solver_flags(solve, solve_flags);
  CLI::Option* solve_gamma =
      solve->add_option("--gamma", gamma, "Override the instance gamma");
  CLI::Option* solve_gamma0 =
      solve->add_option("--gamma0", gamma0, "Override the instance gamma0");

  CLI::App* sim = app.add_subcommand(
      "simulate-ev", "Generate and solve fleet charging instances");
  sim->add_option("--m", ev_m, "Vehicles");
  sim->add_option("--n", ev_n, "Providers");
  sim->add_option("--seed", ev_seed, "Base seed; run k uses seed + k");
  sim->add_option("--runs", ev_runs, "Number of runs")
      ->check(CLI::PositiveNumber);
  sim->add_option("--gamma0", ev_gamma0, "Kernel temperature");
  sim->add_option("--gamma", ev_gamma, "Marginal relaxation weight");
  add_solver_flags(sim, ev_flags);

  CLI::App* check = app.add_subcommand(
      "check", "Certify a solution file against an instance");
  check->add_option("--instance", instance_path, "Instance JSON path")
      ->required();
  check->add_option("--plan", plan_path, "Solution JSON path")->required();
  check->add_option("--tol", check_tol, "Residual tolerance for pass/fail");
  CLI::Option* check_gamma =
      check->add_option("--gamma", gamma, "Override the instance gamma");
  CLI::Option* check_gamma0 =
      check->add_option("--gamma0", gamma0, "Override the instance gamma0");

  CLI::App* oracle = app.add_subcommand(
      "oracle", "Reference minimizer for tiny instances");
  oracle->add_option("--instance", instance_path, "Instance JSON path")
      ->required();
  oracle->add_option("--out", oracle_flags.out,
                     "Write the solution to this path");
  oracle->add_option("--format", oracle_flags.format,
                     "Plan layout in output files")
      ->check(CLI::IsMember({"dense", "sparse"}));
  CLI::Option* oracle_gamma =
      oracle->add_option("--gamma", gamma, "Override the instance gamma");
  CLI::Option* oracle_gamma0 =
      oracle->add_option("--gamma0", gamma0, "Override the instance gamma0");

  CLI::App* feas = app.add_subcommand(
      "feasibility", "Exact-marginal feasibility of the allowed support");
  feas->add_option("--instance", instance_path, "Instance JSON path")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    emit_error("argument", e.what());
    return kExitError;
  }

  try {
    if (app.got_subcommand(solve))
      return run_solve(instance_path, solve_flags,
                       solve_gamma->count() ? &gamma : nullptr,
                       solve_gamma0->count() ? &gamma0 : nullptr);
    if (app.got_subcommand(sim))
      return run_simulate_ev(ev_m, ev_n, ev_seed, ev_runs, ev_gamma0,
                             ev_gamma, ev_flags);
    if (app.got_subcommand(check))
      return run_check(instance_path, plan_path, check_tol,
                       check_gamma->count() ? &gamma : nullptr,
                       check_gamma0->count() ? &gamma0 : nullptr);
    if (app.got_subcommand(oracle))
      return run_oracle(instance_path, oracle_flags,
                        oracle_gamma->count() ? &gamma : nullptr,
                        oracle_gamma0->count() ? &gamma0 : nullptr);
    if (app.got_subcommand(feas)) return run_feasibility(instance_path);
  } catch (const std::exception& e) {
    emit_error("internal", e.what());
    return kExitError;
  }
  emit_error("argument", "no command given");
  return kExitError;
}
