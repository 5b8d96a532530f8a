#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace cans {

// Odd polynomial p(x) = a1*x + a3*x^3 + ... + a_{2d-1}*x^{2d-1}, stored as the
// coefficient list [a1, a3, ..., a_{2d-1}].  Evaluation is Horner in x^2, which
// mirrors the matrix-side cost model (one Gram matrix, then d-1 multiplies).
class OddPolynomial {
 public:
  explicit OddPolynomial(std::vector<double> coeffs);

  // p(x) = 1.5x - 0.5x^3, the classical Newton-Schulz cubic.
  static OddPolynomial newton_schulz();

  const std::vector<double>& coeffs() const { return coeffs_; }

  // number of odd terms d; the polynomial degree is 2d-1
  std::size_t term_count() const { return coeffs_.size(); }
  int degree() const { return static_cast<int>(2 * coeffs_.size()) - 1; }

  double operator()(double x) const;
  double derivative(double x) const;
  double derivative_at_zero() const { return coeffs_.front(); }

  // matrix multiplications needed to apply this polynomial to a matrix
  long matmul_cost() const { return static_cast<long>(coeffs_.size()); }

 private:
  std::vector<double> coeffs_;
};

// Composition g = p_k(...p_2(p_1(x))...); polynomials are stored innermost
// first, i.e. polys[0] is applied first.
class Composition {
 public:
  explicit Composition(std::vector<OddPolynomial> polys);

  const std::vector<OddPolynomial>& polys() const { return polys_; }
  std::size_t size() const { return polys_.size(); }

  double operator()(double x) const;
  double derivative_at_zero() const;  // product of the stages' linear terms
  long matmul_cost() const;

 private:
  std::vector<OddPolynomial> polys_;
};

// Roots of p' in the open interval (a, b), sorted ascending.  Found by a
// 4096-sample sign scan of p' refined by bisection until the bracketing
// interval is narrower than 1e-14*b.
std::vector<double> critical_points(const OddPolynomial& p, double a, double b);

// (min, max) of p over [a, b]: evaluates p on a uniform grid of `grid_size`
// points plus every interior critical point.  Requires 0 <= a < b.
std::pair<double, double> range_on_interval(const OddPolynomial& p, double a,
                                            double b,
                                            std::size_t grid_size = 1024);

}  // namespace cans
