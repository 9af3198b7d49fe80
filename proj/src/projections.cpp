#include "otz/projections.hpp"

#include "otz/errors.hpp"
#include "otz/reduce.hpp"

namespace otz {

AugmentedPoint project_rows(const AugmentedPoint& x,
                            std::span<const double> u_tilde) {
  if (static_cast<int>(u_tilde.size()) != x.t.rows())
    throw Error(ErrorCode::InvalidArgument,
                "u_tilde length does not match plan rows");
  AugmentedPoint out{x.t, x.v};
  const std::vector<double> rs = row_sums(out.t);
  std::vector<double> c1(rs.size());
  for (std::size_t i = 0; i < rs.size(); ++i) c1[i] = u_tilde[i] / rs[i];
  scale_rows(out.t, c1);
  return out;
}

AugmentedPoint project_columns(const AugmentedPoint& x, double gamma) {
  if (!(gamma > 0))
    throw Error(ErrorCode::InvalidArgument, "gamma must be positive");
  if (static_cast<std::size_t>(x.t.cols()) != x.v.size())
    throw Error(ErrorCode::InvalidArgument,
                "v length does not match plan columns");
  AugmentedPoint out{x.t, x.v};
  const double col_exp = gamma / (1.0 + gamma);
  const double v_exp = -1.0 / gamma;
  const std::vector<double> cs = col_sums(out.t);
  std::vector<double> c2(cs.size());
  for (std::size_t j = 0; j < cs.size(); ++j)
    c2[j] = pow_pos(out.v[j] / cs[j], col_exp);
  scale_cols(out.t, c2);
  for (std::size_t j = 0; j < cs.size(); ++j)
    out.v[j] = pow_pos(c2[j], v_exp) * out.v[j];
  return out;
}

std::vector<AugmentedPoint> alternate(const ProblemInstance& inst,
                                      long iterations, StorageLayout layout) {
  if (iterations < 0)
    throw Error(ErrorCode::InvalidArgument, "iterations must be >= 0");
  const Prepared prep = prepare(inst, layout);
  std::vector<AugmentedPoint> seq;
  seq.reserve(static_cast<std::size_t>(iterations) + 1);
  seq.push_back(AugmentedPoint{prep.kernel, inst.marginals.v_tilde});
  for (long l = 0; l < iterations; ++l) {
    AugmentedPoint rowed = project_rows(seq.back(), inst.marginals.u_tilde);
    seq.push_back(project_columns(rowed, inst.gamma));
  }
  return seq;
}

}  // namespace otz
