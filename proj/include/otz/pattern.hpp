#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace otz {

using IndexPair = std::array<int, 2>;

// Set of forbidden (row, col) entries plus the support structure derived from
// it. "Support" is the complement of the forbidden set; support entries are
// enumerated in a fixed row-major order that every matrix layout and every
// reduction shares.
//
// Construction rejects out-of-range and duplicate pairs. Rows or columns whose
// entries are all forbidden are representable here; instance validation
// reports them.
class ZeroPattern {
 public:
  ZeroPattern(int rows, int cols, std::span<const IndexPair> forbidden);

  static std::shared_ptr<const ZeroPattern> create(
      int rows, int cols, std::span<const IndexPair> forbidden);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t forbidden_count() const { return forbidden_.size(); }
  std::size_t support_size() const { return support_col_.size(); }

  bool is_forbidden(int i, int j) const;

  // Canonical row-major support enumeration.
  int support_row(std::size_t pos) const { return support_row_[pos]; }
  int support_col(std::size_t pos) const { return support_col_[pos]; }
  std::size_t row_begin(int i) const { return row_ptr_[i]; }
  std::size_t row_end(int i) const { return row_ptr_[std::size_t(i) + 1]; }

  // Support positions of one column, in increasing row order.
  std::span<const std::size_t> col_support(int j) const;

  // Position of (i, j) in the support enumeration; support_size() if (i, j)
  // is forbidden.
  std::size_t support_find(int i, int j) const;

  std::vector<int> rows_without_support() const;
  std::vector<int> cols_without_support() const;

  // Sorted row-major.
  std::span<const IndexPair> forbidden_pairs() const { return forbidden_; }

  bool same_structure(const ZeroPattern& other) const;

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<IndexPair> forbidden_;        // sorted
  std::vector<std::int64_t> forbidden_flat_;  // sorted i*cols+j
  std::vector<int> support_row_, support_col_;
  std::vector<std::size_t> row_ptr_;   // rows+1
  std::vector<std::size_t> col_ptr_;   // cols+1
  std::vector<std::size_t> col_pos_;   // support positions grouped by column
};

}  // namespace otz
