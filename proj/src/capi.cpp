#include "otzero.h"

#include <cstring>
#include <exception>
#include <limits>
#include <new>
#include <string>
#include <vector>

#include <json.hpp>

#include "otz/errors.hpp"
#include "otz/feasibility.hpp"
#include "otz/instance.hpp"
#include "otz/io.hpp"
#include "otz/scenarios.hpp"
#include "otz/solver.hpp"
#include "otz/verify.hpp"

struct otz_instance {
  otz::ProblemInstance inst;
};

struct otz_solution {
  otz::SolutionData data;
  std::vector<otz::TraceRow> trace;  // empty when loaded from a file
};

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

otz_status status_of(const otz::Error& e) {
  using otz::ErrorCode;
  switch (e.code()) {
    case ErrorCode::InvalidArgument: return OTZ_ERR_ARGUMENT;
    case ErrorCode::DomainError: return OTZ_ERR_ARGUMENT;
    case ErrorCode::PatternMismatch: return OTZ_ERR_ARGUMENT;
    case ErrorCode::Validation: return OTZ_ERR_VALIDATION;
    case ErrorCode::KernelUnderflow: return OTZ_ERR_KERNEL_UNDERFLOW;
    case ErrorCode::UnbalancedInput: return OTZ_ERR_UNBALANCED;
    case ErrorCode::TooLarge: return OTZ_ERR_TOO_LARGE;
    case ErrorCode::PatternSamplingFailed: return OTZ_ERR_PATTERN_SAMPLING;
    case ErrorCode::UnsupportedPattern: return OTZ_ERR_UNSUPPORTED;
    case ErrorCode::ParseError: return OTZ_ERR_PARSE;
    case ErrorCode::IoError: return OTZ_ERR_IO;
  }
  return OTZ_ERR_INTERNAL;
}

// Runs `fn`, translating exceptions into statuses and the thread-local
// message. Out-parameters must only be assigned inside `fn` on success.
template <typename Fn>
otz_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return OTZ_OK;
  } catch (const otz::Error& e) {
    set_error(e.what());
    return status_of(e);
  } catch (const std::bad_alloc&) {
    set_error("out of memory");
    return OTZ_ERR_INTERNAL;
  } catch (const std::exception& e) {
    set_error(e.what());
    return OTZ_ERR_INTERNAL;
  } catch (...) {
    set_error("unknown error");
    return OTZ_ERR_INTERNAL;
  }
}

otz_status bad_argument(const char* msg) {
  set_error(msg);
  return OTZ_ERR_ARGUMENT;
}

otz::Algorithm to_algorithm(otz_algorithm a) {
  switch (a) {
    case OTZ_ALG1: return otz::Algorithm::Alg1;
    case OTZ_ALG2: return otz::Algorithm::Alg2;
    case OTZ_SK: return otz::Algorithm::SK;
    case OTZ_CHIZAT: return otz::Algorithm::Chizat;
  }
  throw otz::Error(otz::ErrorCode::InvalidArgument, "unknown algorithm");
}

otz_termination to_c_termination(otz::Termination t) {
  switch (t) {
    case otz::Termination::Converged: return OTZ_TERM_CONVERGED;
    case otz::Termination::MaxIterations: return OTZ_TERM_MAX_ITERATIONS;
    case otz::Termination::NumericalFailure:
      return OTZ_TERM_NUMERICAL_FAILURE;
  }
  return OTZ_TERM_NUMERICAL_FAILURE;
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(::operator new(s.size() + 1));
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* otz_status_name(otz_status s) {
  switch (s) {
    case OTZ_OK: return "ok";
    case OTZ_ERR_ARGUMENT: return "argument";
    case OTZ_ERR_IO: return "io";
    case OTZ_ERR_PARSE: return "parse";
    case OTZ_ERR_VALIDATION: return "validation";
    case OTZ_ERR_KERNEL_UNDERFLOW: return "kernel_underflow";
    case OTZ_ERR_UNBALANCED: return "unbalanced";
    case OTZ_ERR_TOO_LARGE: return "too_large";
    case OTZ_ERR_PATTERN_SAMPLING: return "pattern_sampling";
    case OTZ_ERR_UNSUPPORTED: return "unsupported";
    case OTZ_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* otz_last_error(void) { return g_last_error.c_str(); }

void otz_string_free(char* s) { ::operator delete(s); }

otz_status otz_instance_read(const char* path, otz_instance** out) {
  if (!path || !out) return bad_argument("path and out must be non-null");
  return guarded([&] {
    auto handle = new otz_instance{otz::read_instance(path)};
    *out = handle;
  });
}

otz_status otz_instance_parse(const char* json_text, otz_instance** out) {
  if (!json_text || !out)
    return bad_argument("json_text and out must be non-null");
  return guarded([&] {
    auto handle = new otz_instance{otz::parse_instance(json_text)};
    *out = handle;
  });
}

otz_status otz_instance_write(const otz_instance* inst, const char* path) {
  if (!inst || !path) return bad_argument("inst and path must be non-null");
  return guarded([&] { otz::write_instance(inst->inst, path); });
}

void otz_instance_free(otz_instance* inst) { delete inst; }

int otz_instance_rows(const otz_instance* inst) {
  return inst ? inst->inst.m : 0;
}

int otz_instance_cols(const otz_instance* inst) {
  return inst ? inst->inst.n : 0;
}

double otz_instance_gamma0(const otz_instance* inst) {
  return inst ? inst->inst.gamma0 : 0.0;
}

double otz_instance_gamma(const otz_instance* inst) {
  return inst ? inst->inst.gamma : 0.0;
}

otz_status otz_instance_set_gamma0(otz_instance* inst, double gamma0) {
  if (!inst) return bad_argument("inst must be non-null");
  if (!(gamma0 > 0)) return bad_argument("gamma0 must be positive");
  inst->inst.gamma0 = gamma0;
  g_last_error.clear();
  return OTZ_OK;
}

otz_status otz_instance_set_gamma(otz_instance* inst, double gamma) {
  if (!inst) return bad_argument("inst must be non-null");
  if (!(gamma > 0)) return bad_argument("gamma must be positive");
  inst->inst.gamma = gamma;
  g_last_error.clear();
  return OTZ_OK;
}

otz_status otz_instance_validate(const otz_instance* inst,
                                 char** violations_json) {
  if (!inst) return bad_argument("inst must be non-null");
  try {
    const std::vector<otz::Violation> violations =
        otz::validate_instance(inst->inst);
    if (violations.empty()) {
      g_last_error.clear();
      return OTZ_OK;
    }
    if (violations_json) {
      nlohmann::json arr = nlohmann::json::array();
      for (const otz::Violation& v : violations) {
        nlohmann::json item;
        item["kind"] = otz::violation_kind_name(v.kind);
        if (v.index >= 0) item["index"] = v.index;
        item["detail"] = v.detail;
        arr.push_back(std::move(item));
      }
      *violations_json = copy_string(arr.dump());
    }
    set_error(otz::ValidationError(violations).what());
    return OTZ_ERR_VALIDATION;
  } catch (const std::exception& e) {
    set_error(e.what());
    return OTZ_ERR_INTERNAL;
  }
}

otz_status otz_generate_ev(int m, int n, unsigned long long seed,
                           double gamma0, double gamma, otz_instance** out) {
  if (!out) return bad_argument("out must be non-null");
  return guarded([&] {
    otz::EvScenarioConfig cfg;
    cfg.m = m;
    cfg.n = n;
    cfg.seed = seed;
    cfg.gamma0 = gamma0;
    cfg.gamma = gamma;
    *out = new otz_instance{otz::generate_ev_instance(cfg)};
  });
}

otz_status otz_generate_random(int m, int n, double zero_density,
                               unsigned long long seed, double gamma0,
                               double gamma, otz_instance** out) {
  if (!out) return bad_argument("out must be non-null");
  return guarded([&] {
    otz::RandomInstanceConfig cfg;
    cfg.m = m;
    cfg.n = n;
    cfg.zero_density = zero_density;
    cfg.seed = seed;
    cfg.gamma0 = gamma0;
    cfg.gamma = gamma;
    *out = new otz_instance{otz::generate_random_instance(cfg)};
  });
}

otz_status otz_check_feasibility(const otz_instance* inst, int* feasible) {
  if (!inst || !feasible)
    return bad_argument("inst and feasible must be non-null");
  return guarded([&] {
    const otz::Feasibility f = otz::check_feasibility_exact(inst->inst);
    *feasible = f == otz::Feasibility::Feasible ? 1 : 0;
  });
}

void otz_solver_options_init(otz_solver_options* opt) {
  if (!opt) return;
  opt->algorithm = OTZ_ALG1;
  opt->tol_scaling = 1e-9;
  opt->tol_delta = 1e-12;
  opt->max_iter = 100000;
  opt->gamma1 = 1e6;
  opt->gamma2 = 1.0;
  opt->trace_every = 1;
}

otz_status otz_solve(const otz_instance* inst, const otz_solver_options* opt,
                     otz_solution** out) {
  if (!inst || !opt || !out)
    return bad_argument("inst, opt and out must be non-null");
  return guarded([&] {
    otz::SolverConfig cfg;
    cfg.algorithm = to_algorithm(opt->algorithm);
    cfg.tol_scaling = opt->tol_scaling;
    cfg.tol_delta = opt->tol_delta;
    cfg.max_iter = opt->max_iter;
    cfg.gamma1 = opt->gamma1;
    cfg.gamma2 = opt->gamma2;
    cfg.trace_every = opt->trace_every;
    otz::SolveReport report = otz::solve(inst->inst, cfg);
    auto sol = new otz_solution;
    sol->trace = std::move(report.trace);
    sol->data = otz::solution_from_report(
        report, otz::algorithm_name(cfg.algorithm));
    *out = sol;
  });
}

otz_status otz_oracle_solve(const otz_instance* inst, otz_solution** out) {
  if (!inst || !out) return bad_argument("inst and out must be non-null");
  return guarded([&] {
    const otz::TransportPlan plan = otz::oracle_minimize(inst->inst);
    auto sol = new otz_solution;
    sol->data.m = inst->inst.m;
    sol->data.n = inst->inst.n;
    sol->data.algorithm = "oracle";
    sol->data.termination = otz::Termination::Converged;
    sol->data.iterations = 0;
    sol->data.v_star = otz::col_sums(plan);
    sol->data.plan = plan.to_dense();
    *out = sol;
  });
}

otz_status otz_solution_read(const char* path, otz_solution** out) {
  if (!path || !out) return bad_argument("path and out must be non-null");
  return guarded([&] {
    auto sol = new otz_solution;
    sol->data = otz::read_solution(path);
    *out = sol;
  });
}

otz_status otz_solution_write(const otz_solution* sol, const char* path,
                              int dense_format) {
  if (!sol || !path) return bad_argument("sol and path must be non-null");
  return guarded(
      [&] { otz::write_solution(sol->data, path, dense_format != 0); });
}

otz_status otz_solution_to_json(const otz_solution* sol, int dense_format,
                                char** out) {
  if (!sol || !out) return bad_argument("sol and out must be non-null");
  return guarded([&] {
    *out = copy_string(otz::solution_to_json(sol->data, dense_format != 0));
  });
}

otz_status otz_solution_write_trace(const otz_solution* sol,
                                    const char* path) {
  if (!sol || !path) return bad_argument("sol and path must be non-null");
  if (sol->trace.empty())
    return bad_argument("solution carries no iteration trace");
  return guarded([&] { otz::write_trace_csv(sol->trace, path); });
}

void otz_solution_free(otz_solution* sol) { delete sol; }

otz_termination otz_solution_termination(const otz_solution* sol) {
  return sol ? to_c_termination(sol->data.termination)
             : OTZ_TERM_NUMERICAL_FAILURE;
}

int otz_solution_suspected_infeasible(const otz_solution* sol) {
  return sol && sol->data.suspected_infeasible ? 1 : 0;
}

long otz_solution_iterations(const otz_solution* sol) {
  return sol ? sol->data.iterations : 0;
}

int otz_solution_rows(const otz_solution* sol) {
  return sol ? sol->data.m : 0;
}

int otz_solution_cols(const otz_solution* sol) {
  return sol ? sol->data.n : 0;
}

double otz_solution_entry(const otz_solution* sol, int i, int j) {
  if (!sol || i < 0 || i >= sol->data.m || j < 0 || j >= sol->data.n)
    return std::numeric_limits<double>::quiet_NaN();
  return sol->data.plan.at(i, j);
}

otz_status otz_solution_v_star(const otz_solution* sol, double* buf,
                               int len) {
  if (!sol || !buf) return bad_argument("sol and buf must be non-null");
  if (len < sol->data.n)
    return bad_argument("buffer shorter than the column count");
  for (int j = 0; j < sol->data.n; ++j)
    buf[j] = sol->data.v_star[static_cast<std::size_t>(j)];
  g_last_error.clear();
  return OTZ_OK;
}

otz_status otz_check_solution(const otz_instance* inst,
                              const otz_solution* sol, otz_optimality* out) {
  if (!inst || !sol || !out)
    return bad_argument("inst, sol and out must be non-null");
  return guarded([&] {
    const otz::OptimalityReport rep = otz::check_solution(
        inst->inst, sol->data.plan, sol->data.v_star);
    out->fixed_point_residual = rep.fixed_point_residual;
    out->row_residual = rep.row_residual;
    out->balance_residual = rep.balance_residual;
    out->min_support_entry = rep.min_support_entry;
    out->min_v_star = rep.min_v_star;
    out->positivity_ok = rep.positivity_ok ? 1 : 0;
    out->support_components = rep.support_components;
  });
}

}  // extern "C"
