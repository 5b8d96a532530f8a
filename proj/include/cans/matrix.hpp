#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace cans {

// Dense row-major double matrix.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols);  // zero-initialized

  static DenseMatrix identity(std::size_t n);
  static DenseMatrix diagonal(std::span<const double> d);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) {
    return data_[i * cols_ + j];
  }
  double operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  bool same_shape(const DenseMatrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// C = A*B, blocked over 64x64 tiles, single-threaded and deterministic by
// default.  threads > 1 splits row tiles across std::thread workers; each
// output element is still accumulated in the same order, so results match the
// serial product bit for bit on this implementation (documented caveat: that
// is a property of the partitioning, not a portable guarantee).
DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b,
                     int threads = 1);

DenseMatrix transpose(const DenseMatrix& a);

// X^T * X
DenseMatrix gram(const DenseMatrix& x, int threads = 1);

// a*X + b*Y elementwise
DenseMatrix add_scaled(double alpha, const DenseMatrix& x, double beta,
                       const DenseMatrix& y);

DenseMatrix scale(const DenseMatrix& x, double alpha);

double frobenius_norm(const DenseMatrix& a);

// || A - I ||_F (A square)
double identity_residual(const DenseMatrix& a);

bool all_finite(const DenseMatrix& a);

// Text format: first line "m n", then m rows of n values, >= 17 significant
// digits on write.
std::string to_text(const DenseMatrix& a);
DenseMatrix matrix_from_text(std::istream& in);
DenseMatrix read_matrix_file(const std::string& path);
void write_matrix_file(const std::string& path, const DenseMatrix& a);

}  // namespace cans
