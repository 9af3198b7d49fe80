#include <cmath>
#include <vector>

#include <doctest.h>

#include "helpers.hpp"
#include "otz/divergence.hpp"
#include "otz/projections.hpp"
#include "otz/solver.hpp"
#include "otz/verify.hpp"

using namespace otz;
using namespace otz::testing;

TEST_CASE("a constructed exact fixed point certifies cleanly") {
  // Bi-feasible kernel: plan = K, v* = v is stationary with unit scalings.
  auto inst = make_instance(2, 3, {3, 3}, {2, 2, 2}, std::vector<double>(6, 0.0));
  const Prepared prep = prepare(inst);
  OptimalityReport rep =
      check_kkt(inst, prep.kernel, inst.marginals.v_tilde);
  CHECK(rep.fixed_point_residual < 1e-12);
  CHECK(rep.row_residual < 1e-14);
  CHECK(rep.balance_residual < 1e-14);
  CHECK(rep.positivity_ok);
  CHECK(rep.min_support_entry > 0);
  CHECK(rep.min_v_star > 0);
  CHECK(rep.support_components == 1);
}

TEST_CASE("disconnected support is certified per component") {
  // Block-diagonal support: {0,1}x{0,1} and {2,3}x{2,3} only.
  std::vector<IndexPair> forbidden;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if ((i < 2) != (j < 2)) forbidden.push_back({i, j});
  auto inst = make_instance(4, 4, {1, 1, 1, 1}, {1, 1, 1, 1},
                            std::vector<double>(16, 0.0), forbidden);
  SolverConfig cfg;
  SolveReport sol = solve_alg1(inst, cfg);
  REQUIRE(sol.termination == Termination::Converged);
  OptimalityReport rep = check_kkt(inst, sol.plan, sol.v_star);
  CHECK(rep.support_components == 2);
  CHECK(rep.fixed_point_residual < 1e-8);
  CHECK(rep.positivity_ok);
}

TEST_CASE("converged solves pass certification, perturbed plans fail") {
  auto inst = random_instance(5, 5, 0.15, 2718, 1.2, 1.5);
  SolverConfig cfg;
  SolveReport sol = solve_alg1(inst, cfg);
  REQUIRE(sol.termination == Termination::Converged);

  OptimalityReport good = check_kkt(inst, sol.plan, sol.v_star);
  CHECK(good.fixed_point_residual < 1e-8);
  CHECK(good.positivity_ok);
  CHECK(good.min_v_star > 0);

  // A 1% bump of one support entry must be clearly detected.
  TransportPlan bumped = sol.plan;
  bumped.set_support_value(0, bumped.support_value(0) * 1.01);
  OptimalityReport bad = check_kkt(inst, bumped, sol.v_star);
  CHECK(bad.fixed_point_residual > 1e-3);
}

TEST_CASE("positivity check truth table") {
  auto p = ZeroPattern::create(2, 2, std::vector<IndexPair>{{0, 1}});
  DenseMatrix good{2, 2, {0.5, 0.0, 0.25, 0.75}};
  CHECK(check_positivity(good, *p));

  DenseMatrix zero_on_support{2, 2, {0.5, 0.0, 0.0, 0.75}};
  CHECK_FALSE(check_positivity(zero_on_support, *p));

  DenseMatrix mass_on_pattern{2, 2, {0.5, 1e-14, 0.25, 0.75}};
  CHECK_FALSE(check_positivity(mass_on_pattern, *p));

  DenseMatrix negative{2, 2, {0.5, 0.0, -0.25, 0.75}};
  CHECK_FALSE(check_positivity(negative, *p));
}

TEST_CASE("oracle agrees with the scaling solver on tiny instances") {
  // 1x2 and a patterned 2x2; both within the oracle's size budget.
  auto a = make_instance(1, 2, {1}, {0.5, 0.5}, {0.1, 0.7});
  auto b = make_instance(2, 2, {1, 2}, {2, 1}, {0.3, 0.2, 0.1, 0.0},
                         {{1, 1}}, 1.0, 1.5);
  for (const ProblemInstance& inst : {a, b}) {
    SolverConfig cfg;
    SolveReport sol = solve_alg1(inst, cfg);
    REQUIRE(sol.termination == Termination::Converged);
    TransportPlan ref = oracle_minimize(inst);
    CHECK(max_rel_diff(sol.plan, ref) < 1e-6);
    const double f_sol = objective(inst, sol.plan).total;
    const double f_ref = objective(inst, ref).total;
    CHECK(std::abs(f_sol - f_ref) < 1e-8);
  }
}

TEST_CASE("oracle recovers the kernel when it is already feasible") {
  auto inst = make_instance(2, 2, {2, 2}, {2, 2}, {0, 0, 0, 0});
  const Prepared prep = prepare(inst);
  TransportPlan ref = oracle_minimize(inst);
  CHECK(max_rel_diff(ref, prep.kernel) < 1e-6);
}

TEST_CASE("oracle rejects instances beyond its size budget") {
  auto big = random_instance(4, 4, 0.0, 5);
  try {
    oracle_minimize(big);
    FAIL("expected TooLarge");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TooLarge);
  }
}

TEST_CASE("limit properties hold for balanced and unbalanced data") {
  SolverConfig cfg;
  auto balanced = random_instance(6, 4, 0.15, 99, 1.3, 1.4);
  SolveReport sb = solve_alg1(balanced, cfg);
  REQUIRE(sb.termination == Termination::Converged);
  OptimalityReport rb = check_limit_properties(sb, balanced);
  CHECK(std::isnan(rb.fixed_point_residual));
  CHECK(rb.row_residual < 1e-9);
  CHECK(rb.balance_residual < 1e-9);
  CHECK(rb.positivity_ok);
  CHECK(rb.min_v_star > 0);

  auto unbalanced = balanced;
  for (double& x : unbalanced.marginals.u_tilde) x *= 1.3;
  SolveReport su = solve_alg1(unbalanced, cfg);
  REQUIRE(su.termination == Termination::Converged);
  OptimalityReport ru = check_limit_properties(su, unbalanced);
  CHECK(ru.row_residual < 1e-9);
  CHECK(ru.balance_residual < 1e-9);
  CHECK(ru.min_v_star > 0);
}

TEST_CASE("relaxed marginal recovers v when the kernel is bi-feasible") {
  auto inst = make_instance(2, 3, {3, 3}, {2, 2, 2}, std::vector<double>(6, 0.0));
  SolverConfig cfg;
  SolveReport sol = solve_alg1(inst, cfg);
  REQUIRE(sol.termination == Termination::Converged);
  for (int j = 0; j < 3; ++j)
    CHECK(sol.v_star[j] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("limit properties require a converged report") {
  auto inst = random_instance(3, 3, 0.1, 42);
  SolverConfig cfg;
  cfg.tol_scaling = 0.0;
  cfg.tol_delta = 0.0;
  cfg.max_iter = 3;
  SolveReport sol = solve_alg1(inst, cfg);
  REQUIRE(sol.termination == Termination::MaxIterations);
  try {
    check_limit_properties(sol, inst);
    FAIL("expected InvalidArgument");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidArgument);
  }
}

TEST_CASE("independent runs land on the same point") {
  auto inst = random_instance(4, 6, 0.2, 1234, 1.1, 2.2);
  SolverConfig cfg;
  SolveReport r1 = solve_alg1(inst, cfg);
  SolveReport r2 = solve_alg2(inst, cfg);
  REQUIRE(r1.termination == Termination::Converged);
  REQUIRE(r2.termination == Termination::Converged);
  CHECK(max_rel_diff(r1.plan, r2.plan) < 1e-10);

  std::vector<AugmentedPoint> path = alternate(inst, r1.iterations);
  CHECK(max_rel_diff(path.back().t, r1.plan) < 1e-10);
}

TEST_CASE("raw plan certification accepts solver output") {
  auto inst = random_instance(4, 4, 0.15, 777);
  SolverConfig cfg;
  SolveReport sol = solve_alg1(inst, cfg);
  REQUIRE(sol.termination == Termination::Converged);
  DenseMatrix dense = sol.plan.to_dense();
  OptimalityReport rep = check_solution(inst, dense, sol.v_star);
  CHECK(rep.positivity_ok);
  CHECK(rep.fixed_point_residual < 1e-8);
  CHECK(rep.row_residual < 1e-8);
}

TEST_CASE("raw plan certification flags pattern violations") {
  auto inst = make_instance(2, 2, {1, 2}, {2, 1}, {0.3, 0.2, 0.1, 0.0},
                            {{1, 1}});
  SolverConfig cfg;
  SolveReport sol = solve_alg1(inst, cfg);
  REQUIRE(sol.termination == Termination::Converged);
  DenseMatrix dense = sol.plan.to_dense();
  dense.at(1, 1) = 0.05;  // mass on a forbidden entry
  OptimalityReport rep = check_solution(inst, dense, sol.v_star);
  CHECK_FALSE(rep.positivity_ok);
  CHECK(std::isinf(rep.fixed_point_residual));
}

TEST_CASE("certification argument guards") {
  auto inst = make_instance(2, 2, {1, 2}, {2, 1}, {0.3, 0.2, 0.1, 0.0});
  SolverConfig cfg;
  SolveReport sol = solve_alg1(inst, cfg);

  const std::vector<double> short_v = {1.0};
  CHECK_THROWS_AS(check_kkt(inst, sol.plan, short_v), Error);

  // Plan with a different pattern than the instance.
  auto other = ZeroPattern::create(2, 2, std::vector<IndexPair>{{0, 0}});
  TransportPlan wrong = SupportMatrix::constant(other, 1.0);
  try {
    check_kkt(inst, wrong, sol.v_star);
    FAIL("expected PatternMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::PatternMismatch);
  }

  DenseMatrix bad_shape{1, 2, {1.0, 1.0}};
  CHECK_THROWS_AS(check_solution(inst, bad_shape, sol.v_star), Error);
}
