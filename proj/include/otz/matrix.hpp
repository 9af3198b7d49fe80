#pragma once

#include <memory>
#include <span>
#include <vector>

#include "otz/pattern.hpp"

namespace otz {

enum class StorageLayout { Auto, Dense, Masked };

// Plain row-major matrix. Used for raw inputs (costs, ideal plans, plans read
// from files) before they are tied to a pattern.
struct DenseMatrix {
  int rows = 0, cols = 0;
  std::vector<double> values;  // rows*cols, row-major

  static DenseMatrix zeros(int rows, int cols);
  double at(int i, int j) const { return values[std::size_t(i) * cols + j]; }
  double& at(int i, int j) { return values[std::size_t(i) * cols + j]; }
  bool empty() const { return values.empty(); }
};

using CostMatrix = DenseMatrix;

// Matrix with structural zeros on a pattern. Support values are stored either
// densely (rows*cols array, pattern slots pinned at zero) or masked (support
// entries only). Layout is chosen from the pattern density unless forced.
// Reductions gather support values in the canonical order regardless of
// layout, so both layouts produce bit-identical results.
class SupportMatrix {
 public:
  SupportMatrix() = default;

  static SupportMatrix zeros(std::shared_ptr<const ZeroPattern> pattern,
                             StorageLayout layout = StorageLayout::Auto);
  static SupportMatrix constant(std::shared_ptr<const ZeroPattern> pattern,
                                double value,
                                StorageLayout layout = StorageLayout::Auto);
  // `vals` in canonical support order.
  static SupportMatrix from_support_values(
      std::shared_ptr<const ZeroPattern> pattern, std::span<const double> vals,
      StorageLayout layout = StorageLayout::Auto);
  // Entries of `d` on the pattern are ignored.
  static SupportMatrix from_dense(std::shared_ptr<const ZeroPattern> pattern,
                                  const DenseMatrix& d,
                                  StorageLayout layout = StorageLayout::Auto);

  int rows() const { return pattern_ ? pattern_->rows() : 0; }
  int cols() const { return pattern_ ? pattern_->cols() : 0; }
  const std::shared_ptr<const ZeroPattern>& pattern() const { return pattern_; }
  bool dense_layout() const { return dense_; }
  std::size_t support_size() const {
    return pattern_ ? pattern_->support_size() : 0;
  }

  double support_value(std::size_t pos) const { return values_[slot(pos)]; }
  void set_support_value(std::size_t pos, double v) { values_[slot(pos)] = v; }

  // 0 on the pattern.
  double at(int i, int j) const;

  std::vector<double> support_values() const;  // canonical order
  DenseMatrix to_dense() const;

 private:
  std::size_t slot(std::size_t pos) const {
    return dense_ ? std::size_t(pattern_->support_row(pos)) * pattern_->cols() +
                        pattern_->support_col(pos)
                  : pos;
  }

  std::shared_ptr<const ZeroPattern> pattern_;
  bool dense_ = true;
  std::vector<double> values_;
};

bool resolve_dense_layout(const ZeroPattern& pattern, StorageLayout layout);

// Reductions and in-place scalings. All sums are pairwise over the canonical
// support gather order.
std::vector<double> row_sums(const SupportMatrix& a);
std::vector<double> col_sums(const SupportMatrix& a);
void scale_rows(SupportMatrix& a, std::span<const double> factors);
void scale_cols(SupportMatrix& a, std::span<const double> factors);

double support_sum(const SupportMatrix& a);
double support_min(const SupportMatrix& a);
// Pairwise sum of |a - b| over the support. Patterns must match structurally.
double support_abs_diff_sum(const SupportMatrix& a, const SupportMatrix& b);
bool support_all_finite(const SupportMatrix& a);

}  // namespace otz
