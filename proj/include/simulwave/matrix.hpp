#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

namespace simulwave::numerics {

/// Dense row-major matrix of doubles. The one matrix type used across the
/// project; everything here is desk-scale, so no sparsity or views.
class DenseMatrix {
public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static DenseMatrix identity(std::size_t n);
  /// Build from a nested brace list; all rows must have equal length.
  static DenseMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  /// True when every entry is finite.
  bool all_finite() const;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix transpose(const DenseMatrix& m);
DenseMatrix add(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix subtract(const DenseMatrix& a, const DenseMatrix& b);
std::vector<double> matvec(const DenseMatrix& m, const std::vector<double>& v);

/// Largest absolute entry; 0 for an empty matrix.
double max_abs(const DenseMatrix& m);
double frobenius_norm(const DenseMatrix& m);
/// Largest |a_ij - a_ji|, a cheap symmetry defect measure.
double symmetry_defect(const DenseMatrix& m);

/// Paste src into dst with its top-left corner at (row, col).
void insert_block(DenseMatrix& dst, const DenseMatrix& src, std::size_t row, std::size_t col);

}  // namespace simulwave::numerics
