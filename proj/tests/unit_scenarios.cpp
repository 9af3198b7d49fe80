#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include <doctest.h>

#include "helpers.hpp"
#include "otz/scenarios.hpp"

using namespace otz;
using namespace otz::testing;

TEST_CASE("uniform stream stays strictly inside the unit interval") {
  UniformStream rng(7);
  double lo = 1.0, hi = 0.0;
  for (int k = 0; k < 100000; ++k) {
    const double x = rng.next();
    CHECK(x > 0.0);
    CHECK(x < 1.0);
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  CHECK(lo < 0.01);
  CHECK(hi > 0.99);

  UniformStream again(7);
  CHECK(again.next() == UniformStream(7).next());
}

TEST_CASE("uniform stream mean is near one half") {
  UniformStream rng(123);
  double acc = 0;
  const int draws = 100000;
  for (int k = 0; k < draws; ++k) acc += rng.next();
  CHECK(std::abs(acc / draws - 0.5) < 0.01);
}

TEST_CASE("fleet scenario forbids odd rows at odd columns") {
  EvScenarioConfig cfg;
  cfg.m = 4;
  cfg.n = 4;
  cfg.seed = 3;
  ProblemInstance inst = generate_ev_instance(cfg);
  REQUIRE(inst.zero_pattern.size() == 4);
  std::set<std::pair<int, int>> got;
  for (const IndexPair& p : inst.zero_pattern) got.insert({p[0], p[1]});
  const std::set<std::pair<int, int>> want = {
      {1, 1}, {1, 3}, {3, 1}, {3, 3}};
  CHECK(got == want);

  // Odd dimensions: floor counts.
  cfg.m = 5;
  cfg.n = 3;
  ProblemInstance odd = generate_ev_instance(cfg);
  CHECK(odd.zero_pattern.size() == std::size_t(2 * 1));

  // Every row and column keeps support (even columns are always allowed).
  auto violations = validate_instance(odd);
  CHECK(violations.empty());
}

TEST_CASE("fleet scenario is reproducible per seed") {
  EvScenarioConfig cfg;
  cfg.m = 6;
  cfg.n = 5;
  cfg.seed = 42;
  ProblemInstance a = generate_ev_instance(cfg);
  ProblemInstance b = generate_ev_instance(cfg);
  CHECK(a.marginals.u_tilde == b.marginals.u_tilde);
  CHECK(a.marginals.v_tilde == b.marginals.v_tilde);
  CHECK(a.cost.values == b.cost.values);
  REQUIRE(a.zero_pattern.size() == b.zero_pattern.size());
  for (std::size_t q = 0; q < a.zero_pattern.size(); ++q) {
    CHECK(a.zero_pattern[q][0] == b.zero_pattern[q][0]);
    CHECK(a.zero_pattern[q][1] == b.zero_pattern[q][1]);
  }

  cfg.seed = 43;
  ProblemInstance c = generate_ev_instance(cfg);
  CHECK(a.marginals.u_tilde != c.marginals.u_tilde);
  CHECK(validate_instance(a).empty());
  CHECK(a.gamma0 == doctest::Approx(1.99));
  CHECK(a.gamma == doctest::Approx(1.005));

  // Forbidden cost entries are stored as zero placeholders.
  for (const IndexPair& p : a.zero_pattern)
    CHECK(a.cost.at(p[0], p[1]) == 0.0);
}

TEST_CASE("fleet scenario rejects degenerate shapes") {
  EvScenarioConfig cfg;
  cfg.m = 1;
  cfg.n = 4;
  try {
    generate_ev_instance(cfg);
    FAIL("expected InvalidArgument");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidArgument);
  }
  cfg.m = 4;
  cfg.n = 0;
  CHECK_THROWS_AS(generate_ev_instance(cfg), Error);
  cfg.n = 4;
  cfg.gamma0 = 0.0;
  CHECK_THROWS_AS(generate_ev_instance(cfg), Error);
}

TEST_CASE("random instances validate and reproduce") {
  ProblemInstance a = random_instance(3, 3, 0.2, 11, 1.5, 2.0);
  ProblemInstance b = random_instance(3, 3, 0.2, 11, 1.5, 2.0);
  CHECK(validate_instance(a).empty());
  CHECK(a.marginals.u_tilde == b.marginals.u_tilde);
  CHECK(a.cost.values == b.cost.values);
  CHECK(a.zero_pattern.size() == b.zero_pattern.size());
  CHECK(a.zero_pattern.size() == std::size_t(0.2 * 9));  // floor(1.8) = 1

  ProblemInstance dense = random_instance(4, 5, 0.0, 2);
  CHECK(dense.zero_pattern.empty());
  CHECK(validate_instance(dense).empty());

  // Forbidden pairs are unique and in range.
  ProblemInstance patterned = random_instance(6, 6, 0.3, 5);
  std::set<std::pair<int, int>> seen;
  for (const IndexPair& p : patterned.zero_pattern) {
    CHECK(p[0] >= 0);
    CHECK(p[0] < 6);
    CHECK(p[1] >= 0);
    CHECK(p[1] < 6);
    CHECK(seen.insert({p[0], p[1]}).second);
  }
  CHECK(patterned.zero_pattern.size() == std::size_t(0.3 * 36));
}

TEST_CASE("dense forbidden sampling gives up after bounded retries") {
  // 0.95 density on 3x3 forbids 8 of 9 entries; some row or column always
  // loses all support.
  try {
    random_instance(3, 3, 0.95, 1);
    FAIL("expected PatternSamplingFailed");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::PatternSamplingFailed);
  }
}

TEST_CASE("random instance guards") {
  CHECK_THROWS_AS(random_instance(0, 3, 0.0, 1), Error);
  CHECK_THROWS_AS(random_instance(3, 3, 1.0, 1), Error);
  CHECK_THROWS_AS(random_instance(3, 3, -0.1, 1), Error);
  CHECK_THROWS_AS(random_instance(3, 3, 0.0, 1, 0.0), Error);
  CHECK_THROWS_AS(random_instance(3, 3, 0.0, 1, 1.0, -1.0), Error);
}

TEST_CASE("marginal draws have the uniform mean") {
  // The first m draws of the stream are the row marginal.
  double acc = 0;
  const int runs = 200;
  for (int s = 0; s < runs; ++s) {
    ProblemInstance inst = random_instance(50, 2, 0.0, 10000 + s);
    for (double x : inst.marginals.u_tilde) acc += x;
  }
  CHECK(std::abs(acc / (runs * 50) - 0.5) < 0.01);
}
