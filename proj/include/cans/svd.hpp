#pragma once

#include <vector>

#include "cans/matrix.hpp"

namespace cans {

// Thin SVD A = U * diag(s) * V^T with U (m x n), V (n x n) and s sorted
// non-increasing.
struct SvdResult {
  DenseMatrix u;
  std::vector<double> s;
  DenseMatrix v;
};

// Reference oracle: one-sided Jacobi on the columns of A.  Requires
// m >= n and n <= 512 (use transpose(A) for wide inputs).  Accuracy target:
// reconstruction and orthogonality residuals <= 1e-10 * ||A||_F.
SvdResult reference_svd(const DenseMatrix& a);

inline constexpr std::size_t kSvdSizeCap = 512;

}  // namespace cans
