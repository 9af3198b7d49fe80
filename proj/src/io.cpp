#include "otz/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "otz/errors.hpp"

namespace otz {

namespace {

using njson = nlohmann::json;
using ojson = nlohmann::ordered_json;

[[noreturn]] void parse_fail(const std::string& what) {
  throw Error(ErrorCode::ParseError, what);
}

void require_fields(const njson& obj, const std::set<std::string>& allowed,
                    const std::set<std::string>& required,
                    const char* what) {
  if (!obj.is_object()) parse_fail(std::string(what) + " must be a JSON object");
  for (const auto& item : obj.items())
    if (!allowed.count(item.key()))
      parse_fail(std::string("unknown field \"") + item.key() + "\" in " +
                 what);
  for (const auto& name : required)
    if (!obj.contains(name))
      parse_fail(std::string("missing field \"") + name + "\" in " + what);
}

int get_int(const njson& obj, const char* name) {
  const njson& v = obj.at(name);
  if (!v.is_number_integer())
    parse_fail(std::string("field \"") + name + "\" must be an integer");
  return v.get<int>();
}

double get_double(const njson& v, const std::string& where) {
  if (!v.is_number()) parse_fail(where + " must be a number");
  return v.get<double>();
}

std::vector<double> get_double_array(const njson& obj, const char* name) {
  const njson& v = obj.at(name);
  if (!v.is_array())
    parse_fail(std::string("field \"") + name + "\" must be an array");
  std::vector<double> out;
  out.reserve(v.size());
  for (std::size_t q = 0; q < v.size(); ++q)
    out.push_back(get_double(v[q], std::string(name) + "[" +
                                       std::to_string(q) + "]"));
  return out;
}

bool looks_dense(const njson& arr, int m, int n) {
  if (static_cast<int>(arr.size()) != m) return false;
  for (const njson& row : arr) {
    if (!row.is_array() || static_cast<int>(row.size()) != n) return false;
    for (const njson& x : row)
      if (!x.is_number()) return false;
  }
  return true;
}

// Shared reader for matrix-valued fields that accept either m rows of n
// numbers or [i, j, value] triples. The dense reading wins when both shapes
// fit (only possible when n == 3). Triples overwrite `base`; duplicate or
// out-of-range triples are rejected.
DenseMatrix parse_matrix_field(const njson& arr, int m, int n,
                               DenseMatrix base, const char* name) {
  if (!arr.is_array())
    parse_fail(std::string("field \"") + name + "\" must be an array");
  if (looks_dense(arr, m, n)) {
    DenseMatrix out = DenseMatrix::zeros(m, n);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j)
        out.values[static_cast<std::size_t>(i) * n + j] =
            arr[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]
                .get<double>();
    return out;
  }
  std::set<long> seen;
  for (std::size_t q = 0; q < arr.size(); ++q) {
    const njson& t = arr[q];
    const std::string where =
        std::string(name) + "[" + std::to_string(q) + "]";
    if (!t.is_array() || t.size() != 3)
      parse_fail(where + " must be an [i, j, value] triple");
    if (!t[0].is_number_integer() || !t[1].is_number_integer())
      parse_fail(where + " indices must be integers");
    const int i = t[0].get<int>(), j = t[1].get<int>();
    if (i < 0 || i >= m || j < 0 || j >= n)
      parse_fail(where + " index out of range");
    const long flat = static_cast<long>(i) * n + j;
    if (!seen.insert(flat).second)
      parse_fail(where + " duplicates an earlier entry");
    base.values[static_cast<std::size_t>(flat)] =
        get_double(t[2], where + " value");
  }
  return base;
}

ojson matrix_to_json(const DenseMatrix& mat,
                     const std::vector<IndexPair>& pattern,
                     bool dense_format) {
  ojson out = ojson::array();
  if (dense_format) {
    for (int i = 0; i < mat.rows; ++i) {
      ojson row = ojson::array();
      for (int j = 0; j < mat.cols; ++j) row.push_back(mat.at(i, j));
      out.push_back(std::move(row));
    }
    return out;
  }
  std::set<long> forbidden;
  for (const IndexPair& pr : pattern)
    forbidden.insert(static_cast<long>(pr[0]) * mat.cols + pr[1]);
  for (int i = 0; i < mat.rows; ++i)
    for (int j = 0; j < mat.cols; ++j)
      if (!forbidden.count(static_cast<long>(i) * mat.cols + j))
        out.push_back(ojson::array({i, j, mat.at(i, j)}));
  return out;
}

std::vector<IndexPair> parse_pattern_field(const njson& arr) {
  if (!arr.is_array())
    parse_fail("field \"zero_pattern\" must be an array of [i, j] pairs");
  std::vector<IndexPair> out;
  out.reserve(arr.size());
  for (std::size_t q = 0; q < arr.size(); ++q) {
    const njson& pr = arr[q];
    if (!pr.is_array() || pr.size() != 2 || !pr[0].is_number_integer() ||
        !pr[1].is_number_integer())
      parse_fail("zero_pattern[" + std::to_string(q) +
                 "] must be an [i, j] pair of integers");
    out.push_back(IndexPair{pr[0].get<int>(), pr[1].get<int>()});
  }
  return out;
}

njson parse_text(const std::string& json_text) {
  try {
    return njson::parse(json_text);
  } catch (const njson::exception& e) {
    parse_fail(e.what());
  }
}

Termination termination_from_name(const std::string& name) {
  if (name == "converged") return Termination::Converged;
  if (name == "max_iterations") return Termination::MaxIterations;
  if (name == "numerical_failure") return Termination::NumericalFailure;
  parse_fail("unknown termination \"" + name + "\"");
}

}  // namespace

ProblemInstance parse_instance(const std::string& json_text) {
  const njson j = parse_text(json_text);
  try {
    require_fields(j,
                   {"m", "n", "u_tilde", "v_tilde", "cost", "zero_pattern",
                    "ideal_plan", "gamma0", "gamma"},
                   {"m", "n", "u_tilde", "v_tilde", "cost", "zero_pattern",
                    "gamma0", "gamma"},
                   "instance");
    ProblemInstance inst;
    inst.m = get_int(j, "m");
    inst.n = get_int(j, "n");
    if (inst.m < 1 || inst.n < 1)
      parse_fail("m and n must be positive");
    inst.marginals.u_tilde = get_double_array(j, "u_tilde");
    inst.marginals.v_tilde = get_double_array(j, "v_tilde");
    inst.zero_pattern = parse_pattern_field(j.at("zero_pattern"));
    inst.cost = parse_matrix_field(j.at("cost"), inst.m, inst.n,
                                   DenseMatrix::zeros(inst.m, inst.n),
                                   "cost");
    if (j.contains("ideal_plan")) {
      // Base for triple form: the all-ones default off the pattern.
      std::set<long> forbidden;
      for (const IndexPair& pr : inst.zero_pattern)
        if (pr[0] >= 0 && pr[0] < inst.m && pr[1] >= 0 && pr[1] < inst.n)
          forbidden.insert(static_cast<long>(pr[0]) * inst.n + pr[1]);
      DenseMatrix base = DenseMatrix::zeros(inst.m, inst.n);
      for (long flat = 0;
           flat < static_cast<long>(inst.m) * inst.n; ++flat)
        if (!forbidden.count(flat))
          base.values[static_cast<std::size_t>(flat)] = 1.0;
      inst.ideal = parse_matrix_field(j.at("ideal_plan"), inst.m, inst.n,
                                      std::move(base), "ideal_plan");
      for (long flat : forbidden)
        if (inst.ideal.values[static_cast<std::size_t>(flat)] != 0.0)
          parse_fail("ideal_plan must be zero on the zero pattern");
    }
    inst.gamma0 = get_double(j.at("gamma0"), "gamma0");
    inst.gamma = get_double(j.at("gamma"), "gamma");
    return inst;
  } catch (const njson::exception& e) {
    parse_fail(e.what());
  }
}

ProblemInstance read_instance(const std::string& path) {
  return parse_instance(read_text_file(path));
}

std::string instance_to_json(const ProblemInstance& inst) {
  ojson j;
  j["m"] = inst.m;
  j["n"] = inst.n;
  j["u_tilde"] = inst.marginals.u_tilde;
  j["v_tilde"] = inst.marginals.v_tilde;
  std::vector<IndexPair> pattern = inst.zero_pattern;
  std::sort(pattern.begin(), pattern.end());
  j["cost"] = matrix_to_json(inst.cost, pattern, pattern.empty());
  ojson pat = ojson::array();
  for (const IndexPair& pr : pattern)
    pat.push_back(ojson::array({pr[0], pr[1]}));
  j["zero_pattern"] = std::move(pat);
  if (!inst.ideal.empty())
    j["ideal_plan"] = matrix_to_json(inst.ideal, pattern, pattern.empty());
  j["gamma0"] = inst.gamma0;
  j["gamma"] = inst.gamma;
  return j.dump(2) + "\n";
}

void write_instance(const ProblemInstance& inst, const std::string& path) {
  write_text_file(path, instance_to_json(inst));
}

SolutionData solution_from_report(const SolveReport& report,
                                  const std::string& algorithm) {
  SolutionData sol;
  sol.m = report.plan.rows();
  sol.n = report.plan.cols();
  sol.algorithm = algorithm;
  sol.termination = report.termination;
  sol.suspected_infeasible = report.suspected_infeasible;
  sol.iterations = report.iterations;
  sol.residuals = report.final_metrics;
  sol.v_star = report.v_star;
  sol.plan = report.plan.to_dense();
  return sol;
}

std::string solution_to_json(const SolutionData& sol, bool dense_format) {
  ojson j;
  j["m"] = sol.m;
  j["n"] = sol.n;
  j["algorithm"] = sol.algorithm;
  j["termination"] = termination_name(sol.termination);
  j["suspected_infeasible"] = sol.suspected_infeasible;
  j["iterations"] = sol.iterations;
  if (sol.residuals) {
    ojson r;
    r["max_c1_dev"] = sol.residuals->max_c1_dev;
    r["max_c2_dev"] = sol.residuals->max_c2_dev;
    r["sum_abs_delta"] = sol.residuals->sum_abs_delta;
    r["sum_t"] = sol.residuals->sum_t;
    r["row_residual"] = sol.residuals->row_residual;
    r["col_residual"] = sol.residuals->col_residual;
    j["residuals"] = std::move(r);
  }
  j["v_star"] = sol.v_star;
  if (dense_format) {
    j["plan"] = matrix_to_json(sol.plan, {}, true);
  } else {
    // Sparse form keeps exact zeros implicit.
    ojson triples = ojson::array();
    for (int i = 0; i < sol.plan.rows; ++i)
      for (int jj = 0; jj < sol.plan.cols; ++jj)
        if (sol.plan.at(i, jj) != 0.0)
          triples.push_back(ojson::array({i, jj, sol.plan.at(i, jj)}));
    j["plan"] = std::move(triples);
  }
  return j.dump(2) + "\n";
}

void write_solution(const SolutionData& sol, const std::string& path,
                    bool dense_format) {
  write_text_file(path, solution_to_json(sol, dense_format));
}

SolutionData parse_solution(const std::string& json_text) {
  const njson j = parse_text(json_text);
  try {
    require_fields(j,
                   {"m", "n", "algorithm", "termination",
                    "suspected_infeasible", "iterations", "residuals",
                    "v_star", "plan"},
                   {"m", "n", "algorithm", "termination",
                    "suspected_infeasible", "iterations", "v_star", "plan"},
                   "solution");
    SolutionData sol;
    sol.m = get_int(j, "m");
    sol.n = get_int(j, "n");
    if (sol.m < 1 || sol.n < 1) parse_fail("m and n must be positive");
    if (!j.at("algorithm").is_string())
      parse_fail("field \"algorithm\" must be a string");
    sol.algorithm = j.at("algorithm").get<std::string>();
    if (!j.at("termination").is_string())
      parse_fail("field \"termination\" must be a string");
    sol.termination =
        termination_from_name(j.at("termination").get<std::string>());
    if (!j.at("suspected_infeasible").is_boolean())
      parse_fail("field \"suspected_infeasible\" must be a boolean");
    sol.suspected_infeasible = j.at("suspected_infeasible").get<bool>();
    if (!j.at("iterations").is_number_integer())
      parse_fail("field \"iterations\" must be an integer");
    sol.iterations = j.at("iterations").get<long>();
    if (j.contains("residuals")) {
      const njson& r = j.at("residuals");
      require_fields(r,
                     {"max_c1_dev", "max_c2_dev", "sum_abs_delta", "sum_t",
                      "row_residual", "col_residual"},
                     {"max_c1_dev", "max_c2_dev", "sum_abs_delta", "sum_t",
                      "row_residual", "col_residual"},
                     "residuals");
      IterationMetrics metrics;
      metrics.max_c1_dev = get_double(r.at("max_c1_dev"), "max_c1_dev");
      metrics.max_c2_dev = get_double(r.at("max_c2_dev"), "max_c2_dev");
      metrics.sum_abs_delta =
          get_double(r.at("sum_abs_delta"), "sum_abs_delta");
      metrics.sum_t = get_double(r.at("sum_t"), "sum_t");
      metrics.row_residual =
          get_double(r.at("row_residual"), "row_residual");
      metrics.col_residual =
          get_double(r.at("col_residual"), "col_residual");
      sol.residuals = metrics;
    }
    sol.v_star = get_double_array(j, "v_star");
    sol.plan = parse_matrix_field(j.at("plan"), sol.m, sol.n,
                                  DenseMatrix::zeros(sol.m, sol.n), "plan");
    return sol;
  } catch (const njson::exception& e) {
    parse_fail(e.what());
  }
}

SolutionData read_solution(const std::string& path) {
  return parse_solution(read_text_file(path));
}

std::string trace_to_csv(const std::vector<TraceRow>& trace) {
  std::string out =
      "iter,sum_abs_delta,log_delta_normalized,max_c1_dev,max_c2_dev,"
      "objective_total,row_residual,col_residual\n";
  for (const TraceRow& row : trace) {
    out += std::to_string(row.iter);
    out += ',';
    out += format_double(row.sum_abs_delta);
    out += ',';
    out += format_double(row.log_delta_normalized);
    out += ',';
    out += format_double(row.max_c1_dev);
    out += ',';
    out += format_double(row.max_c2_dev);
    out += ',';
    out += format_double(row.objective_total);
    out += ',';
    out += format_double(row.row_residual);
    out += ',';
    out += format_double(row.col_residual);
    out += '\n';
  }
  return out;
}

void write_trace_csv(const std::vector<TraceRow>& trace,
                     const std::string& path) {
  write_text_file(path, trace_to_csv(trace));
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::IoError, "cannot read " + path);
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path);
  out << text;
  out.flush();
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

}  // namespace otz
