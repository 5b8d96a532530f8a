#include "cans/svd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "cans/errors.hpp"

namespace cans {

// One-sided Jacobi: rotate column pairs of a working copy of A until all
// pairs are numerically orthogonal, accumulating the rotations in V.
SvdResult reference_svd(const DenseMatrix& a) {
  const std::size_t m = a.rows(), n = a.cols();
  if (m < n)
    throw std::invalid_argument(
        "reference_svd: need rows >= cols (transpose wide inputs)");
  if (n > kSvdSizeCap)
    throw NumericError("reference_svd: size cap 512 exceeded");
  if (n == 0) throw std::invalid_argument("reference_svd: empty matrix");

  DenseMatrix w = a;
  DenseMatrix v = DenseMatrix::identity(n);
  constexpr double kTol = 1e-15;
  constexpr int kMaxSweeps = 60;

  bool converged = false;
  for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
    converged = true;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (std::size_t r = 0; r < m; ++r) {
          const double wi = w(r, i), wj = w(r, j);
          alpha += wi * wi;
          beta += wj * wj;
          gamma += wi * wj;
        }
        if (std::abs(gamma) <= kTol * std::sqrt(alpha * beta)) continue;
        converged = false;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t r = 0; r < m; ++r) {
          const double wi = w(r, i), wj = w(r, j);
          w(r, i) = c * wi - s * wj;
          w(r, j) = s * wi + c * wj;
        }
        for (std::size_t r = 0; r < n; ++r) {
          const double vi = v(r, i), vj = v(r, j);
          v(r, i) = c * vi - s * vj;
          v(r, j) = s * vi + c * vj;
        }
      }
    }
  }
  if (!converged)
    throw NumericError("reference_svd: Jacobi sweeps did not converge");

  std::vector<double> sigma(n);
  for (std::size_t j = 0; j < n; ++j) {
    double sum = 0.0;
    for (std::size_t r = 0; r < m; ++r) sum += w(r, j) * w(r, j);
    sigma[j] = std::sqrt(sum);
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return sigma[x] > sigma[y];
  });

  SvdResult out{DenseMatrix(m, n), std::vector<double>(n), DenseMatrix(n, n)};
  double sigma_max = 0.0;
  for (std::size_t j = 0; j < n; ++j) sigma_max = std::max(sigma_max, sigma[j]);
  const double tiny = (sigma_max > 0.0 ? sigma_max : 1.0) * 1e-300;

  std::size_t filled = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t src = order[j];
    out.s[j] = sigma[src];
    for (std::size_t r = 0; r < n; ++r) out.v(r, j) = v(r, src);
    if (sigma[src] > tiny) {
      for (std::size_t r = 0; r < m; ++r)
        out.u(r, j) = w(r, src) / sigma[src];
      ++filled;
    }
  }
  // Complete U for (near-)zero singular values: Gram-Schmidt coordinate
  // vectors against the columns already in place.
  for (std::size_t j = filled; j < n; ++j) {
    for (std::size_t e = 0; e < m; ++e) {
      std::vector<double> cand(m, 0.0);
      cand[e] = 1.0;
      for (std::size_t k = 0; k < j; ++k) {
        double dot = 0.0;
        for (std::size_t r = 0; r < m; ++r) dot += out.u(r, k) * cand[r];
        for (std::size_t r = 0; r < m; ++r) cand[r] -= dot * out.u(r, k);
      }
      double norm = 0.0;
      for (double x : cand) norm += x * x;
      norm = std::sqrt(norm);
      if (norm > 1e-6) {
        for (std::size_t r = 0; r < m; ++r) out.u(r, j) = cand[r] / norm;
        break;
      }
    }
  }
  return out;
}

}  // namespace cans
