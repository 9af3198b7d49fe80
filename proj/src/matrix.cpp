#include "otz/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "otz/errors.hpp"
#include "otz/reduce.hpp"

namespace otz {

DenseMatrix DenseMatrix::zeros(int rows, int cols) {
  DenseMatrix d;
  d.rows = rows;
  d.cols = cols;
  d.values.assign(std::size_t(rows) * std::size_t(cols), 0.0);
  return d;
}

bool resolve_dense_layout(const ZeroPattern& pattern, StorageLayout layout) {
  switch (layout) {
    case StorageLayout::Dense: return true;
    case StorageLayout::Masked: return false;
    case StorageLayout::Auto: break;
  }
  // Dense wins while forbidden entries are the minority.
  return 2 * pattern.forbidden_count() <
         std::size_t(pattern.rows()) * std::size_t(pattern.cols());
}

namespace {
void require_pattern(const std::shared_ptr<const ZeroPattern>& p) {
  if (!p)
    throw Error(ErrorCode::InvalidArgument, "null pattern");
}
}  // namespace

SupportMatrix SupportMatrix::zeros(std::shared_ptr<const ZeroPattern> pattern,
                                   StorageLayout layout) {
  require_pattern(pattern);
  SupportMatrix a;
  a.dense_ = resolve_dense_layout(*pattern, layout);
  a.values_.assign(a.dense_ ? std::size_t(pattern->rows()) * pattern->cols()
                            : pattern->support_size(),
                   0.0);
  a.pattern_ = std::move(pattern);
  return a;
}

SupportMatrix SupportMatrix::constant(
    std::shared_ptr<const ZeroPattern> pattern, double value,
    StorageLayout layout) {
  SupportMatrix a = zeros(std::move(pattern), layout);
  for (std::size_t pos = 0; pos < a.support_size(); ++pos)
    a.set_support_value(pos, value);
  return a;
}

SupportMatrix SupportMatrix::from_support_values(
    std::shared_ptr<const ZeroPattern> pattern, std::span<const double> vals,
    StorageLayout layout) {
  require_pattern(pattern);
  if (vals.size() != pattern->support_size())
    throw Error(ErrorCode::InvalidArgument,
                "expected " + std::to_string(pattern->support_size()) +
                    " support values, got " + std::to_string(vals.size()));
  SupportMatrix a = zeros(std::move(pattern), layout);
  for (std::size_t pos = 0; pos < vals.size(); ++pos)
    a.set_support_value(pos, vals[pos]);
  return a;
}

SupportMatrix SupportMatrix::from_dense(
    std::shared_ptr<const ZeroPattern> pattern, const DenseMatrix& d,
    StorageLayout layout) {
  require_pattern(pattern);
  if (d.rows != pattern->rows() || d.cols != pattern->cols())
    throw Error(ErrorCode::InvalidArgument,
                "dense matrix is " + std::to_string(d.rows) + "x" +
                    std::to_string(d.cols) + ", pattern is " +
                    std::to_string(pattern->rows()) + "x" +
                    std::to_string(pattern->cols()));
  SupportMatrix a = zeros(std::move(pattern), layout);
  const ZeroPattern& p = *a.pattern_;
  for (std::size_t pos = 0; pos < a.support_size(); ++pos)
    a.set_support_value(pos, d.at(p.support_row(pos), p.support_col(pos)));
  return a;
}

double SupportMatrix::at(int i, int j) const {
  if (dense_) return values_[std::size_t(i) * pattern_->cols() + j];
  const std::size_t pos = pattern_->support_find(i, j);
  return pos == pattern_->support_size() ? 0.0 : values_[pos];
}

std::vector<double> SupportMatrix::support_values() const {
  std::vector<double> out(support_size());
  for (std::size_t pos = 0; pos < out.size(); ++pos)
    out[pos] = support_value(pos);
  return out;
}

DenseMatrix SupportMatrix::to_dense() const {
  DenseMatrix d = DenseMatrix::zeros(rows(), cols());
  for (std::size_t pos = 0; pos < support_size(); ++pos)
    d.at(pattern_->support_row(pos), pattern_->support_col(pos)) =
        support_value(pos);
  return d;
}

std::vector<double> row_sums(const SupportMatrix& a) {
  const ZeroPattern& p = *a.pattern();
  std::vector<double> sums(p.rows());
  std::vector<double> scratch;
  for (int i = 0; i < p.rows(); ++i) {
    scratch.clear();
    for (std::size_t pos = p.row_begin(i); pos < p.row_end(i); ++pos)
      scratch.push_back(a.support_value(pos));
    sums[i] = pairwise_sum(scratch.data(), scratch.size());
  }
  return sums;
}

std::vector<double> col_sums(const SupportMatrix& a) {
  const ZeroPattern& p = *a.pattern();
  std::vector<double> sums(p.cols());
  std::vector<double> scratch;
  for (int j = 0; j < p.cols(); ++j) {
    scratch.clear();
    for (std::size_t pos : p.col_support(j))
      scratch.push_back(a.support_value(pos));
    sums[j] = pairwise_sum(scratch.data(), scratch.size());
  }
  return sums;
}

void scale_rows(SupportMatrix& a, std::span<const double> factors) {
  const ZeroPattern& p = *a.pattern();
  for (std::size_t pos = 0; pos < a.support_size(); ++pos)
    a.set_support_value(pos,
                        a.support_value(pos) * factors[p.support_row(pos)]);
}

void scale_cols(SupportMatrix& a, std::span<const double> factors) {
  const ZeroPattern& p = *a.pattern();
  for (std::size_t pos = 0; pos < a.support_size(); ++pos)
    a.set_support_value(pos,
                        a.support_value(pos) * factors[p.support_col(pos)]);
}

double support_sum(const SupportMatrix& a) {
  std::vector<double> vals = a.support_values();
  return pairwise_sum(vals.data(), vals.size());
}

double support_min(const SupportMatrix& a) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t pos = 0; pos < a.support_size(); ++pos)
    m = std::min(m, a.support_value(pos));
  return m;
}

double support_abs_diff_sum(const SupportMatrix& a, const SupportMatrix& b) {
  if (!a.pattern()->same_structure(*b.pattern()))
    throw Error(ErrorCode::PatternMismatch,
                "matrices have different zero patterns");
  std::vector<double> diff(a.support_size());
  for (std::size_t pos = 0; pos < diff.size(); ++pos)
    diff[pos] = std::abs(a.support_value(pos) - b.support_value(pos));
  return pairwise_sum(diff.data(), diff.size());
}

bool support_all_finite(const SupportMatrix& a) {
  for (std::size_t pos = 0; pos < a.support_size(); ++pos)
    if (!std::isfinite(a.support_value(pos))) return false;
  return true;
}

}  // namespace otz
