#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

#include <doctest.h>

#include "helpers.hpp"
#include "otz/feasibility.hpp"
#include "otz/instance.hpp"
#include "otz/matrix.hpp"
#include "otz/pattern.hpp"
#include "otz/reduce.hpp"
#include "otz/scenarios.hpp"

using namespace otz;
using namespace otz::testing;

namespace {

bool has_violation(const std::vector<Violation>& vs, ViolationKind kind,
                   long index = -2) {
  return std::any_of(vs.begin(), vs.end(), [&](const Violation& v) {
    return v.kind == kind && (index == -2 || v.index == index);
  });
}

// Exhaustive search for an integer plan with the given integer marginals and
// forbidden cells; the reference answer for the max-flow feasibility check.
bool integer_plan_exists(const std::vector<int>& u, const std::vector<int>& v,
                         const ZeroPattern& p) {
  const int m = static_cast<int>(u.size());
  const int n = static_cast<int>(v.size());
  std::vector<int> col_rem = v;
  std::function<bool(int, int, int)> place = [&](int i, int j,
                                                 int row_rem) -> bool {
    if (i == m) return true;
    if (j == n)
      return row_rem == 0 && place(i + 1, 0, i + 1 < m ? u[i + 1] : 0);
    if (p.is_forbidden(i, j)) return place(i, j + 1, row_rem);
    const int cap = std::min(row_rem, col_rem[j]);
    for (int x = 0; x <= cap; ++x) {
      col_rem[j] -= x;
      if (place(i, j + 1, row_rem - x)) {
        col_rem[j] += x;
        return true;
      }
      col_rem[j] += x;
    }
    return false;
  };
  return place(0, 0, m > 0 ? u[0] : 0);
}

}  // namespace

TEST_CASE("pairwise sum matches sequential accumulation") {
  std::vector<double> xs;
  for (int k = 1; k <= 10; ++k) xs.push_back(1.0 / k);
  CHECK(pairwise_sum(xs.data(), xs.size()) ==
        std::accumulate(xs.begin(), xs.end(), 0.0));

  xs.clear();
  UniformStream rng(7);
  for (int k = 0; k < 1000; ++k) xs.push_back(rng.next());
  long double exact = 0.0L;
  for (double x : xs) exact += static_cast<long double>(x);
  const double got = pairwise_sum(xs.data(), xs.size());
  CHECK(std::abs(got - static_cast<double>(exact)) <
        1e-13 * static_cast<double>(exact));

  CHECK(pairwise_sum(nullptr, 0) == 0.0);
}

TEST_CASE("pow_pos basics") {
  CHECK(pow_pos(1.0, 0.37) == 1.0);
  CHECK(pow_pos(1.0, -3.0) == 1.0);
  CHECK(pow_pos(2.5, 0.0) == 1.0);
  CHECK(pow_pos(4.0, 0.5) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(pow_pos(2.0, 10.0) == doctest::Approx(1024.0).epsilon(1e-14));
}

TEST_CASE("zero pattern canonical enumeration") {
  const std::vector<IndexPair> z = {{2, 3}, {0, 1}, {1, 0}};
  auto p = ZeroPattern::create(3, 4, z);
  CHECK(p->rows() == 3);
  CHECK(p->cols() == 4);
  CHECK(p->forbidden_count() == 3);
  CHECK(p->support_size() == 9);

  // Row-major support order.
  const std::vector<std::pair<int, int>> expected = {
      {0, 0}, {0, 2}, {0, 3}, {1, 1}, {1, 2}, {1, 3},
      {2, 0}, {2, 1}, {2, 2}};
  REQUIRE(p->support_size() == expected.size());
  for (std::size_t pos = 0; pos < expected.size(); ++pos) {
    CHECK(p->support_row(pos) == expected[pos].first);
    CHECK(p->support_col(pos) == expected[pos].second);
    CHECK(p->support_find(expected[pos].first, expected[pos].second) == pos);
  }
  CHECK(p->row_begin(0) == 0);
  CHECK(p->row_end(0) == 3);
  CHECK(p->row_begin(1) == 3);
  CHECK(p->row_end(2) == 9);

  CHECK(p->is_forbidden(0, 1));
  CHECK(p->is_forbidden(1, 0));
  CHECK_FALSE(p->is_forbidden(0, 0));
  CHECK(p->support_find(0, 1) == p->support_size());

  // Column views keep increasing row order.
  for (int j = 0; j < 4; ++j) {
    const auto cs = p->col_support(j);
    for (std::size_t q = 0; q < cs.size(); ++q) {
      CHECK(p->support_col(cs[q]) == j);
      if (q > 0)
        CHECK(p->support_row(cs[q - 1]) < p->support_row(cs[q]));
    }
  }
  CHECK(p->col_support(0).size() == 2);
  CHECK(p->col_support(3).size() == 2);

  CHECK(p->rows_without_support().empty());
  CHECK(p->cols_without_support().empty());
}

TEST_CASE("zero pattern rejects bad input") {
  CHECK_THROWS_AS(ZeroPattern(0, 2, {}), Error);
  const std::vector<IndexPair> dup = {{0, 0}, {0, 0}};
  CHECK_THROWS_AS(ZeroPattern(2, 2, dup), Error);
  const std::vector<IndexPair> oob = {{2, 0}};
  CHECK_THROWS_AS(ZeroPattern(2, 2, oob), Error);
  const std::vector<IndexPair> neg = {{-1, 0}};
  CHECK_THROWS_AS(ZeroPattern(2, 2, neg), Error);
}

TEST_CASE("zero pattern coverage queries") {
  const std::vector<IndexPair> z = {{0, 0}, {0, 1}};
  auto p = ZeroPattern::create(2, 2, z);
  CHECK(p->rows_without_support() == std::vector<int>{0});
  CHECK(p->cols_without_support().empty());
}

TEST_CASE("same_structure compares dimensions and forbidden set") {
  const std::vector<IndexPair> z = {{1, 1}};
  auto a = ZeroPattern::create(2, 2, z);
  auto b = ZeroPattern::create(2, 2, z);
  auto c = ZeroPattern::create(2, 2, {});
  auto d = ZeroPattern::create(2, 3, {});
  CHECK(a->same_structure(*b));
  CHECK_FALSE(a->same_structure(*c));
  CHECK_FALSE(c->same_structure(*d));
}

TEST_CASE("storage layout choice") {
  auto sparse_heavy = ZeroPattern::create(2, 2, std::vector<IndexPair>{{0, 0}, {1, 1}});
  auto light = ZeroPattern::create(2, 2, std::vector<IndexPair>{{1, 1}});
  CHECK(resolve_dense_layout(*light, StorageLayout::Auto));
  CHECK_FALSE(resolve_dense_layout(*sparse_heavy, StorageLayout::Auto));
  CHECK(resolve_dense_layout(*sparse_heavy, StorageLayout::Dense));
  CHECK_FALSE(resolve_dense_layout(*light, StorageLayout::Masked));
}

TEST_CASE("support matrix access in both layouts") {
  auto p = ZeroPattern::create(2, 3, std::vector<IndexPair>{{0, 2}, {1, 0}});
  const std::vector<double> vals = {1.5, 2.5, 3.5, 4.5};
  for (StorageLayout layout : {StorageLayout::Dense, StorageLayout::Masked}) {
    SupportMatrix a = SupportMatrix::from_support_values(p, vals, layout);
    CHECK(a.dense_layout() == (layout == StorageLayout::Dense));
    CHECK(a.support_values() == vals);
    CHECK(a.at(0, 0) == 1.5);
    CHECK(a.at(0, 1) == 2.5);
    CHECK(a.at(0, 2) == 0.0);
    CHECK(a.at(1, 0) == 0.0);
    CHECK(a.at(1, 1) == 3.5);
    CHECK(a.at(1, 2) == 4.5);

    const DenseMatrix d = a.to_dense();
    CHECK(d.at(0, 2) == 0.0);
    CHECK(d.at(1, 2) == 4.5);
    const SupportMatrix back = SupportMatrix::from_dense(p, d, layout);
    CHECK(back.support_values() == vals);
  }
  CHECK_THROWS_AS(
      SupportMatrix::from_support_values(p, std::vector<double>{1.0}), Error);
}

TEST_CASE("reductions are bit-identical across layouts") {
  // Pattern dense enough that Auto picks masked; compare against forced dense.
  auto inst = random_instance(7, 9, 0.4, 11);
  auto p = ZeroPattern::create(inst.m, inst.n, inst.zero_pattern);
  UniformStream rng(23);
  std::vector<double> vals(p->support_size());
  for (double& x : vals) x = rng.next() * 10.0;

  SupportMatrix a = SupportMatrix::from_support_values(p, vals, StorageLayout::Dense);
  SupportMatrix b = SupportMatrix::from_support_values(p, vals, StorageLayout::Masked);
  REQUIRE(a.dense_layout());
  REQUIRE_FALSE(b.dense_layout());

  CHECK(row_sums(a) == row_sums(b));
  CHECK(col_sums(a) == col_sums(b));
  CHECK(support_sum(a) == support_sum(b));
  CHECK(support_min(a) == support_min(b));

  std::vector<double> rf(static_cast<std::size_t>(inst.m));
  std::vector<double> cf(static_cast<std::size_t>(inst.n));
  for (double& x : rf) x = rng.next() + 0.5;
  for (double& x : cf) x = rng.next() + 0.5;
  scale_rows(a, rf);
  scale_rows(b, rf);
  scale_cols(a, cf);
  scale_cols(b, cf);
  CHECK(a.support_values() == b.support_values());
  CHECK(support_abs_diff_sum(a, b) == 0.0);
  CHECK(support_all_finite(a));
}

TEST_CASE("support_abs_diff_sum rejects mismatched patterns") {
  auto p1 = ZeroPattern::create(2, 2, std::vector<IndexPair>{{1, 1}});
  auto p2 = ZeroPattern::create(2, 2, {});
  SupportMatrix a = SupportMatrix::constant(p1, 1.0);
  SupportMatrix b = SupportMatrix::constant(p2, 1.0);
  CHECK_THROWS_AS(support_abs_diff_sum(a, b), Error);
}

TEST_CASE("validation accepts the 2x2 reference instance") {
  auto inst = make_instance(2, 2, {1, 2}, {1, 2}, {0.1, 0.2, 0.3, 0.4},
                            {{1, 1}});
  CHECK(validate_instance(inst).empty());
}

TEST_CASE("validation reports a fully forbidden row") {
  auto inst = make_instance(2, 2, {1, 2}, {1, 2}, {0.1, 0.2, 0.3, 0.4},
                            {{0, 0}, {0, 1}});
  const auto vs = validate_instance(inst);
  CHECK(has_violation(vs, ViolationKind::ZeroRowInPattern, 0));
}

TEST_CASE("validation reports a fully forbidden column") {
  auto inst = make_instance(2, 2, {1, 2}, {1, 2}, {0.1, 0.2, 0.3, 0.4},
                            {{0, 1}, {1, 1}});
  const auto vs = validate_instance(inst);
  CHECK(has_violation(vs, ViolationKind::ZeroColumnInPattern, 1));
}

TEST_CASE("validation reports nonpositive marginals") {
  auto inst = make_instance(2, 2, {0.0, 2}, {1, 2}, {0.1, 0.2, 0.3, 0.4});
  CHECK(has_violation(validate_instance(inst),
                      ViolationKind::NonpositiveMarginal, 0));

  inst = make_instance(2, 2, {1, 2}, {1, -0.5}, {0.1, 0.2, 0.3, 0.4});
  CHECK(has_violation(validate_instance(inst),
                      ViolationKind::NonpositiveMarginal, 1));

  inst = make_instance(2, 2, {1, std::nan("")}, {1, 2}, {0.1, 0.2, 0.3, 0.4});
  CHECK(has_violation(validate_instance(inst),
                      ViolationKind::NonpositiveMarginal, 1));
}

TEST_CASE("validation reports dimension problems") {
  auto inst = make_instance(2, 2, {1.0}, {1, 2}, {0.1, 0.2, 0.3, 0.4});
  CHECK(has_violation(validate_instance(inst),
                      ViolationKind::DimensionMismatch));

  inst = make_instance(2, 2, {1, 2}, {1, 2}, {0.1, 0.2, 0.3});
  inst.cost.cols = 2;  // wrong value count
  CHECK(has_violation(validate_instance(inst),
                      ViolationKind::DimensionMismatch));

  inst = make_instance(2, 2, {1, 2}, {1, 2}, {0.1, 0.2, 0.3, 0.4});
  inst.gamma = -1.0;
  CHECK(has_violation(validate_instance(inst),
                      ViolationKind::DimensionMismatch));
}

TEST_CASE("validation reports nonpositive ideal entries") {
  auto inst = make_instance(2, 2, {1, 2}, {1, 2}, {0.1, 0.2, 0.3, 0.4},
                            {{1, 1}});
  inst.ideal = DenseMatrix::zeros(2, 2);
  inst.ideal.at(0, 0) = 1.0;
  inst.ideal.at(0, 1) = 0.0;  // off-pattern zero: invalid
  inst.ideal.at(1, 0) = 2.0;
  const auto vs = validate_instance(inst);
  CHECK(has_violation(vs, ViolationKind::NonpositiveIdealEntry, 1));
}

TEST_CASE("validation reports every violation at once") {
  auto inst = make_instance(2, 2, {0.0, 2}, {1, 2}, {0.1, 0.2, 0.3, 0.4},
                            {{0, 0}, {0, 1}});
  const auto vs = validate_instance(inst);
  CHECK(has_violation(vs, ViolationKind::ZeroRowInPattern, 0));
  CHECK(has_violation(vs, ViolationKind::NonpositiveMarginal, 0));
  CHECK(vs.size() >= 2);
}

TEST_CASE("kernel entries") {
  auto p = ZeroPattern::create(2, 2, std::vector<IndexPair>{{1, 1}});
  DenseMatrix cost = DenseMatrix::zeros(2, 2);
  cost.at(0, 1) = 1.99;
  DenseMatrix ideal = DenseMatrix::zeros(2, 2);
  ideal.at(0, 0) = 1.0;
  ideal.at(0, 1) = 1.0;
  ideal.at(1, 0) = 1.0;
  const Kernel k = build_kernel(cost, ideal, 1.99, p);

  CHECK(k.at(0, 0) == 1.0);  // exp(0) with unit ideal
  CHECK(k.at(1, 1) == 0.0);  // forbidden
  // exp(-1): frozen decimal, cross-checked against extended precision.
  CHECK(std::abs(k.at(0, 1) - 0.36787944117144233) < 1e-16);
  const double high_precision =
      static_cast<double>(expl(-1.0L));
  CHECK(std::abs(k.at(0, 1) - high_precision) < 1e-16);
}

TEST_CASE("kernel underflow is an error") {
  auto p = ZeroPattern::create(1, 2, {});
  DenseMatrix cost = DenseMatrix::zeros(1, 2);
  cost.at(0, 1) = 1500.0;  // exp(-1500) underflows
  DenseMatrix ideal = DenseMatrix::zeros(1, 2);
  ideal.at(0, 0) = ideal.at(0, 1) = 1.0;
  try {
    build_kernel(cost, ideal, 1.0, p);
    FAIL("expected KernelUnderflow");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::KernelUnderflow);
  }
}

TEST_CASE("kernel is positive off the pattern and monotone in cost") {
  auto inst = random_instance(4, 5, 0.2, 3);
  const Prepared prep = prepare(inst);
  for (std::size_t pos = 0; pos < prep.kernel.support_size(); ++pos)
    CHECK(prep.kernel.support_value(pos) > 0.0);
  for (const IndexPair& pr : inst.zero_pattern)
    CHECK(prep.kernel.at(pr[0], pr[1]) == 0.0);

  // Increasing one cost entry strictly decreases that kernel entry.
  ProblemInstance bumped = inst;
  bumped.cost.at(0, 0) += 0.125;
  const Prepared prep2 = prepare(bumped);
  CHECK(prep2.kernel.at(0, 0) < prep.kernel.at(0, 0));
}

TEST_CASE("prepare throws ValidationError with details") {
  auto inst = make_instance(2, 2, {0.0, 2}, {1, 2}, {0.1, 0.2, 0.3, 0.4});
  try {
    prepare(inst);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(e.code() == ErrorCode::Validation);
    CHECK_FALSE(e.violations().empty());
  }
}

TEST_CASE("prepare defaults the ideal plan to ones") {
  auto inst = make_instance(2, 2, {1, 2}, {1, 2}, {0, 0, 0, 0}, {{1, 1}});
  const Prepared prep = prepare(inst);
  for (std::size_t pos = 0; pos < prep.ideal.support_size(); ++pos)
    CHECK(prep.ideal.support_value(pos) == 1.0);
  // Zero cost and unit ideal: kernel entries are exactly one.
  for (std::size_t pos = 0; pos < prep.kernel.support_size(); ++pos)
    CHECK(prep.kernel.support_value(pos) == 1.0);
}

TEST_CASE("feasibility of the reference examples") {
  // No pattern, balanced: the outer product is a witness.
  auto inst = make_instance(2, 3, {1.0, 2.0}, {0.5, 1.5, 1.0},
                            std::vector<double>(6, 0.0));
  CHECK(check_feasibility_exact(inst) == Feasibility::Feasible);

  auto blocked = make_instance(2, 2, {1, 2}, {1, 2}, {0, 0, 0, 0}, {{1, 1}});
  CHECK(check_feasibility_exact(blocked) == Feasibility::Infeasible);

  auto open = make_instance(2, 2, {2, 1}, {2, 1}, {0, 0, 0, 0}, {{1, 1}});
  CHECK(check_feasibility_exact(open) == Feasibility::Feasible);
}

TEST_CASE("feasibility requires balanced marginals") {
  auto inst = make_instance(2, 2, {1, 1}, {1, 2}, {0, 0, 0, 0});
  try {
    check_feasibility_exact(inst);
    FAIL("expected UnbalancedInput");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnbalancedInput);
  }
}

TEST_CASE("feasibility matches exhaustive integer enumeration") {
  UniformStream rng(2024);
  int checked = 0, infeasible_seen = 0;
  while (checked < 60) {
    std::vector<int> u(3), v(3);
    int su = 0;
    for (int& x : u) {
      x = 1 + static_cast<int>(rng.next() * 3.0);
      su += x;
    }
    int sv = 0;
    for (int& x : v) {
      x = 1 + static_cast<int>(rng.next() * 3.0);
      sv += x;
    }
    if (su != sv) continue;

    const int zcount = static_cast<int>(rng.next() * 5.0);  // 0..4
    std::vector<IndexPair> z;
    while (static_cast<int>(z.size()) < zcount) {
      IndexPair pr = {static_cast<int>(rng.next() * 3.0),
                      static_cast<int>(rng.next() * 3.0)};
      if (std::find(z.begin(), z.end(), pr) == z.end()) z.push_back(pr);
    }
    auto p = ZeroPattern::create(3, 3, z);
    if (!p->rows_without_support().empty() ||
        !p->cols_without_support().empty())
      continue;

    auto inst = make_instance(3, 3, {double(u[0]), double(u[1]), double(u[2])},
                              {double(v[0]), double(v[1]), double(v[2])},
                              std::vector<double>(9, 0.0), z);
    const bool flow = check_feasibility_exact(inst) == Feasibility::Feasible;
    const bool brute = integer_plan_exists(u, v, *p);
    CHECK(flow == brute);
    if (!brute) ++infeasible_seen;
    ++checked;
  }
  CHECK(infeasible_seen > 0);  // the sample must exercise both answers
}

TEST_CASE("feasibility size guard") {
  auto inst = make_instance(2, 2, {1, 1}, {1, 1}, {0, 0, 0, 0});
  inst.m = 2000;
  inst.n = 2000;  // fails validation anyway, but TooLarge fires first
  try {
    check_feasibility_exact(inst);
    FAIL("expected TooLarge");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TooLarge);
  }
}
