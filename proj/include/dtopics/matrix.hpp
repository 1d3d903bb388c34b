#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace dtopics {

// Row-major dense matrix of doubles.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  const std::vector<double>& data() const { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Compressed sparse rows of doubles; the feature space consumed by k-means.
// Column indices are strictly increasing within a row.
class SparseMatrix {
 public:
  struct RowView {
    std::span<const std::uint32_t> cols;
    std::span<const double> values;
  };

  SparseMatrix() : row_ptr_{0} {}
  explicit SparseMatrix(std::size_t n_cols) : n_cols_(n_cols), row_ptr_{0} {}

  static SparseMatrix from_dense(const DenseMatrix& dense);
  static SparseMatrix from_rows(const std::vector<std::vector<double>>& rows);

  // Appends a row; entries with value 0 are skipped. cols must be strictly
  // increasing and below n_cols().
  void push_row(std::span<const std::uint32_t> cols, std::span<const double> values);

  std::size_t rows() const { return row_ptr_.size() - 1; }
  std::size_t cols() const { return n_cols_; }
  std::size_t nnz() const { return values_.size(); }

  RowView row(std::size_t r) const {
    const std::size_t b = row_ptr_[r], e = row_ptr_[r + 1];
    return {{col_idx_.data() + b, e - b}, {values_.data() + b, e - b}};
  }

  double row_squared_norm(std::size_t r) const;
  DenseMatrix to_dense() const;

 private:
  std::size_t n_cols_ = 0;
  std::vector<std::size_t> row_ptr_;
  std::vector<std::uint32_t> col_idx_;
  std::vector<double> values_;
};

}  // namespace dtopics
