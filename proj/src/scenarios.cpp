#include "otz/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "otz/errors.hpp"

namespace otz {

struct UniformStream::Impl {
  std::mt19937_64 engine;
};

UniformStream::UniformStream(std::uint64_t seed)
    : impl_(new Impl{std::mt19937_64(seed)}) {}

UniformStream::~UniformStream() { delete impl_; }

std::uint64_t UniformStream::next_raw() { return impl_->engine(); }

double UniformStream::next() {
  return (static_cast<double>(impl_->engine() >> 11) + 0.5) * 0x1p-53;
}

namespace {

std::vector<double> draw_vector(UniformStream& rng, int len) {
  std::vector<double> out(static_cast<std::size_t>(len));
  for (double& x : out) x = rng.next();
  return out;
}

// Costs are drawn for every pair in row-major order so the stream position
// does not depend on the pattern; draws on forbidden pairs are discarded and
// the stored cost is zero there.
DenseMatrix draw_costs(UniformStream& rng, int m, int n,
                       const ZeroPattern* pattern) {
  DenseMatrix cost = DenseMatrix::zeros(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) {
      const double c = rng.next();
      if (!pattern || !pattern->is_forbidden(i, j))
        cost.values[static_cast<std::size_t>(i) * n + j] = c;
    }
  return cost;
}

}  // namespace

ProblemInstance generate_ev_instance(const EvScenarioConfig& cfg) {
  if (cfg.m < 2 || cfg.n < 2)
    throw Error(ErrorCode::InvalidArgument,
                "ev scenario requires m >= 2 and n >= 2");
  if (!(cfg.gamma0 > 0) || !(cfg.gamma > 0))
    throw Error(ErrorCode::InvalidArgument,
                "gamma0 and gamma must be positive");

  std::vector<IndexPair> forbidden;
  for (int i = 1; i < cfg.m; i += 2)
    for (int j = 1; j < cfg.n; j += 2)
      forbidden.push_back(IndexPair{i, j});
  auto pattern = ZeroPattern::create(cfg.m, cfg.n, forbidden);

  UniformStream rng(cfg.seed);
  ProblemInstance inst;
  inst.m = cfg.m;
  inst.n = cfg.n;
  inst.marginals.u_tilde = draw_vector(rng, cfg.m);
  inst.marginals.v_tilde = draw_vector(rng, cfg.n);
  inst.cost = draw_costs(rng, cfg.m, cfg.n, pattern.get());
  const auto pairs = pattern->forbidden_pairs();
  inst.zero_pattern.assign(pairs.begin(), pairs.end());
  inst.gamma0 = cfg.gamma0;
  inst.gamma = cfg.gamma;
  return inst;
}

ProblemInstance generate_random_instance(const RandomInstanceConfig& cfg) {
  if (cfg.m < 1 || cfg.n < 1)
    throw Error(ErrorCode::InvalidArgument,
                "random instance requires m >= 1 and n >= 1");
  if (!(cfg.gamma0 > 0) || !(cfg.gamma > 0))
    throw Error(ErrorCode::InvalidArgument,
                "gamma0 and gamma must be positive");
  if (!(cfg.zero_density >= 0.0) || !(cfg.zero_density < 1.0))
    throw Error(ErrorCode::InvalidArgument,
                "zero_density must lie in [0, 1)");

  const long total = static_cast<long>(cfg.m) * cfg.n;
  const long k = static_cast<long>(cfg.zero_density * static_cast<double>(total));

  UniformStream rng(cfg.seed);
  ProblemInstance inst;
  inst.m = cfg.m;
  inst.n = cfg.n;
  inst.marginals.u_tilde = draw_vector(rng, cfg.m);
  inst.marginals.v_tilde = draw_vector(rng, cfg.n);
  DenseMatrix raw_cost = draw_costs(rng, cfg.m, cfg.n, nullptr);
  inst.gamma0 = cfg.gamma0;
  inst.gamma = cfg.gamma;

  // Sample k distinct flat indices by a partial Fisher-Yates shuffle, redrawn
  // while the pattern starves a row or column.
  std::vector<long> flats(static_cast<std::size_t>(total));
  for (long q = 0; q < total; ++q) flats[static_cast<std::size_t>(q)] = q;
  for (int attempt = 0; attempt < 1000; ++attempt) {
    for (long q = 0; q < k; ++q) {
      const long pick =
          q + static_cast<long>(rng.next() * static_cast<double>(total - q));
      std::swap(flats[static_cast<std::size_t>(q)],
                flats[static_cast<std::size_t>(pick)]);
    }
    std::vector<IndexPair> forbidden;
    forbidden.reserve(static_cast<std::size_t>(k));
    for (long q = 0; q < k; ++q) {
      const long flat = flats[static_cast<std::size_t>(q)];
      forbidden.push_back(IndexPair{static_cast<int>(flat / cfg.n),
                                    static_cast<int>(flat % cfg.n)});
    }
    auto pattern = ZeroPattern::create(cfg.m, cfg.n, forbidden);
    if (!pattern->rows_without_support().empty() ||
        !pattern->cols_without_support().empty())
      continue;
    const auto pairs = pattern->forbidden_pairs();
    inst.zero_pattern.assign(pairs.begin(), pairs.end());
    inst.cost = DenseMatrix::zeros(cfg.m, cfg.n);
    for (int i = 0; i < cfg.m; ++i)
      for (int j = 0; j < cfg.n; ++j)
        if (!pattern->is_forbidden(i, j))
          inst.cost.values[static_cast<std::size_t>(i) * cfg.n + j] =
              raw_cost.values[static_cast<std::size_t>(i) * cfg.n + j];
    return inst;
  }
  throw Error(ErrorCode::PatternSamplingFailed,
              "could not sample a pattern covering every row and column "
              "after 1000 attempts");
}

}  // namespace otz
