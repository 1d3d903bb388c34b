#include "dtopics/matrix.hpp"

#include "dtopics/error.hpp"

namespace dtopics {

SparseMatrix SparseMatrix::from_dense(const DenseMatrix& dense) {
  SparseMatrix m(dense.cols());
  std::vector<std::uint32_t> cols;
  std::vector<double> values;
  for (std::size_t r = 0; r < dense.rows(); ++r) {
    cols.clear();
    values.clear();
    for (std::size_t c = 0; c < dense.cols(); ++c) {
      if (dense(r, c) != 0.0) {
        cols.push_back(static_cast<std::uint32_t>(c));
        values.push_back(dense(r, c));
      }
    }
    m.push_row(cols, values);
  }
  return m;
}

SparseMatrix SparseMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  const std::size_t n_cols = rows.empty() ? 0 : rows.front().size();
  DenseMatrix dense(rows.size(), n_cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != n_cols) throw UsageError("ragged rows in dense input");
    for (std::size_t c = 0; c < n_cols; ++c) dense(r, c) = rows[r][c];
  }
  return from_dense(dense);
}

void SparseMatrix::push_row(std::span<const std::uint32_t> cols,
                            std::span<const double> values) {
  if (cols.size() != values.size()) throw UsageError("row index/value length mismatch");
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (cols[i] >= n_cols_) throw UsageError("column index out of range");
    if (i > 0 && cols[i] <= cols[i - 1])
      throw UsageError("column indices must be strictly increasing");
    if (values[i] == 0.0) continue;
    col_idx_.push_back(cols[i]);
    values_.push_back(values[i]);
  }
  row_ptr_.push_back(values_.size());
}

double SparseMatrix::row_squared_norm(std::size_t r) const {
  double s = 0.0;
  for (double v : row(r).values) s += v * v;
  return s;
}

DenseMatrix SparseMatrix::to_dense() const {
  DenseMatrix d(rows(), n_cols_);
  for (std::size_t r = 0; r < rows(); ++r) {
    const auto view = row(r);
    for (std::size_t i = 0; i < view.cols.size(); ++i) d(r, view.cols[i]) = view.values[i];
  }
  return d;
}

}  // namespace dtopics
