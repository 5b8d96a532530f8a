#include "cans/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "cans/errors.hpp"

namespace cans {

namespace {
constexpr std::size_t kTile = 64;
}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::diagonal(std::span<const double> d) {
  DenseMatrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

namespace {

// One horizontal band of C = A*B covering row tiles [row_lo, row_hi).
// k advances in tile order then index order for every output element, so the
// accumulation order is independent of how bands are assigned to threads.
void multiply_band(const DenseMatrix& a, const DenseMatrix& b, DenseMatrix& c,
                   std::size_t row_lo, std::size_t row_hi) {
  const std::size_t n = b.cols(), kk = a.cols();
  for (std::size_t i0 = row_lo; i0 < row_hi; i0 += kTile) {
    const std::size_t i1 = std::min(i0 + kTile, row_hi);
    for (std::size_t k0 = 0; k0 < kk; k0 += kTile) {
      const std::size_t k1 = std::min(k0 + kTile, kk);
      for (std::size_t j0 = 0; j0 < n; j0 += kTile) {
        const std::size_t j1 = std::min(j0 + kTile, n);
        for (std::size_t i = i0; i < i1; ++i) {
          double* crow = &c(i, 0);
          for (std::size_t k = k0; k < k1; ++k) {
            const double aik = a(i, k);
            const double* brow = b.data() + k * n;
            for (std::size_t j = j0; j < j1; ++j) crow[j] += aik * brow[j];
          }
        }
      }
    }
  }
}

}  // namespace

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b, int threads) {
  if (a.cols() != b.rows())
    throw std::invalid_argument("multiply: inner dimensions differ");
  DenseMatrix c(a.rows(), b.cols());
  const std::size_t m = a.rows();
  if (threads <= 1 || m < 2 * kTile) {
    multiply_band(a, b, c, 0, m);
    return c;
  }
  const std::size_t tiles = (m + kTile - 1) / kTile;
  const std::size_t nthreads =
      std::min<std::size_t>(static_cast<std::size_t>(threads), tiles);
  const std::size_t per = (tiles + nthreads - 1) / nthreads;
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < nthreads; ++t) {
    const std::size_t lo = std::min(m, t * per * kTile);
    const std::size_t hi = std::min(m, (t + 1) * per * kTile);
    if (lo >= hi) break;
    pool.emplace_back(multiply_band, std::cref(a), std::cref(b), std::ref(c),
                      lo, hi);
  }
  for (auto& th : pool) th.join();
  return c;
}

DenseMatrix transpose(const DenseMatrix& a) {
  DenseMatrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

DenseMatrix gram(const DenseMatrix& x, int threads) {
  return multiply(transpose(x), x, threads);
}

DenseMatrix add_scaled(double alpha, const DenseMatrix& x, double beta,
                       const DenseMatrix& y) {
  if (!x.same_shape(y))
    throw std::invalid_argument("add_scaled: shape mismatch");
  DenseMatrix r(x.rows(), x.cols());
  const std::size_t total = x.rows() * x.cols();
  for (std::size_t i = 0; i < total; ++i)
    r.data()[i] = alpha * x.data()[i] + beta * y.data()[i];
  return r;
}

DenseMatrix scale(const DenseMatrix& x, double alpha) {
  DenseMatrix r(x.rows(), x.cols());
  const std::size_t total = x.rows() * x.cols();
  for (std::size_t i = 0; i < total; ++i) r.data()[i] = alpha * x.data()[i];
  return r;
}

double frobenius_norm(const DenseMatrix& a) {
  double sum = 0.0;
  const std::size_t total = a.rows() * a.cols();
  for (std::size_t i = 0; i < total; ++i) sum += a.data()[i] * a.data()[i];
  return std::sqrt(sum);
}

double identity_residual(const DenseMatrix& a) {
  if (a.rows() != a.cols())
    throw std::invalid_argument("identity_residual: matrix not square");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const double d = a(i, j) - (i == j ? 1.0 : 0.0);
      sum += d * d;
    }
  return std::sqrt(sum);
}

bool all_finite(const DenseMatrix& a) {
  const std::size_t total = a.rows() * a.cols();
  for (std::size_t i = 0; i < total; ++i)
    if (!std::isfinite(a.data()[i])) return false;
  return true;
}

std::string to_text(const DenseMatrix& a) {
  std::string out;
  out.reserve(a.rows() * a.cols() * 26 + 32);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%zu %zu\n", a.rows(), a.cols());
  out += buf;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", a(i, j));
      out += buf;
      out += (j + 1 == a.cols()) ? '\n' : ' ';
    }
  }
  return out;
}

DenseMatrix matrix_from_text(std::istream& in) {
  std::size_t m = 0, n = 0;
  if (!(in >> m >> n) || m == 0 || n == 0)
    throw ParseError("matrix text: bad header (want \"rows cols\")");
  DenseMatrix a(m, n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (!(in >> a(i, j)))
        throw ParseError("matrix text: not enough numeric entries");
  return a;
}

DenseMatrix read_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open matrix file: " + path);
  return matrix_from_text(in);
}

void write_matrix_file(const std::string& path, const DenseMatrix& a) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write matrix file: " + path);
  out << to_text(a);
}

}  // namespace cans
