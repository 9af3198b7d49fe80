#include "otz/pattern.hpp"

#include <algorithm>
#include <string>

#include "otz/errors.hpp"

namespace otz {

ZeroPattern::ZeroPattern(int rows, int cols,
                         std::span<const IndexPair> forbidden)
    : rows_(rows), cols_(cols) {
  if (rows <= 0 || cols <= 0)
    throw Error(ErrorCode::InvalidArgument,
                "pattern dimensions must be positive, got " +
                    std::to_string(rows) + "x" + std::to_string(cols));

  forbidden_.assign(forbidden.begin(), forbidden.end());
  for (const auto& p : forbidden_) {
    if (p[0] < 0 || p[0] >= rows || p[1] < 0 || p[1] >= cols)
      throw Error(ErrorCode::InvalidArgument,
                  "pattern entry (" + std::to_string(p[0]) + ", " +
                      std::to_string(p[1]) + ") outside " +
                      std::to_string(rows) + "x" + std::to_string(cols));
  }
  std::sort(forbidden_.begin(), forbidden_.end());
  const auto dup = std::adjacent_find(forbidden_.begin(), forbidden_.end());
  if (dup != forbidden_.end())
    throw Error(ErrorCode::InvalidArgument,
                "duplicate pattern entry (" + std::to_string((*dup)[0]) +
                    ", " + std::to_string((*dup)[1]) + ")");

  forbidden_flat_.reserve(forbidden_.size());
  for (const auto& p : forbidden_)
    forbidden_flat_.push_back(std::int64_t(p[0]) * cols + p[1]);

  const std::size_t nnz =
      std::size_t(rows) * std::size_t(cols) - forbidden_.size();
  support_row_.reserve(nnz);
  support_col_.reserve(nnz);
  row_ptr_.assign(std::size_t(rows) + 1, 0);
  std::size_t fk = 0;  // cursor into the sorted forbidden list
  for (int i = 0; i < rows; ++i) {
    row_ptr_[i] = support_col_.size();
    for (int j = 0; j < cols; ++j) {
      if (fk < forbidden_.size() && forbidden_[fk][0] == i &&
          forbidden_[fk][1] == j) {
        ++fk;
        continue;
      }
      support_row_.push_back(i);
      support_col_.push_back(j);
    }
  }
  row_ptr_[rows] = support_col_.size();

  // Column view: counting sort of support positions by column. Scanning
  // positions in row-major order keeps each column's rows increasing.
  col_ptr_.assign(std::size_t(cols) + 1, 0);
  for (int j : support_col_) col_ptr_[std::size_t(j) + 1]++;
  for (int j = 0; j < cols; ++j) col_ptr_[std::size_t(j) + 1] += col_ptr_[j];
  col_pos_.resize(support_col_.size());
  std::vector<std::size_t> cursor(col_ptr_.begin(), col_ptr_.end() - 1);
  for (std::size_t pos = 0; pos < support_col_.size(); ++pos)
    col_pos_[cursor[support_col_[pos]]++] = pos;
}

std::shared_ptr<const ZeroPattern> ZeroPattern::create(
    int rows, int cols, std::span<const IndexPair> forbidden) {
  return std::make_shared<const ZeroPattern>(rows, cols, forbidden);
}

bool ZeroPattern::is_forbidden(int i, int j) const {
  const std::int64_t flat = std::int64_t(i) * cols_ + j;
  return std::binary_search(forbidden_flat_.begin(), forbidden_flat_.end(),
                            flat);
}

std::span<const std::size_t> ZeroPattern::col_support(int j) const {
  return {col_pos_.data() + col_ptr_[j], col_ptr_[std::size_t(j) + 1] - col_ptr_[j]};
}

std::size_t ZeroPattern::support_find(int i, int j) const {
  const auto begin = support_col_.begin() + long(row_ptr_[i]);
  const auto end = support_col_.begin() + long(row_end(i));
  const auto it = std::lower_bound(begin, end, j);
  if (it == end || *it != j) return support_size();
  return row_ptr_[i] + std::size_t(it - begin);
}

std::vector<int> ZeroPattern::rows_without_support() const {
  std::vector<int> out;
  for (int i = 0; i < rows_; ++i)
    if (row_begin(i) == row_end(i)) out.push_back(i);
  return out;
}

std::vector<int> ZeroPattern::cols_without_support() const {
  std::vector<int> out;
  for (int j = 0; j < cols_; ++j)
    if (col_support(j).empty()) out.push_back(j);
  return out;
}

bool ZeroPattern::same_structure(const ZeroPattern& other) const {
  if (this == &other) return true;
  return rows_ == other.rows_ && cols_ == other.cols_ &&
         forbidden_flat_ == other.forbidden_flat_;
}

}  // namespace otz
