#include "cans/poly.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cans {

OddPolynomial::OddPolynomial(std::vector<double> coeffs)
    : coeffs_(std::move(coeffs)) {
  if (coeffs_.empty())
    throw std::invalid_argument("OddPolynomial: empty coefficient list");
  for (double c : coeffs_)
    if (!std::isfinite(c))
      throw std::invalid_argument("OddPolynomial: non-finite coefficient");
}

OddPolynomial OddPolynomial::newton_schulz() {
  return OddPolynomial({1.5, -0.5});
}

double OddPolynomial::operator()(double x) const {
  const double t = x * x;
  double acc = coeffs_.back();
  for (auto it = coeffs_.rbegin() + 1; it != coeffs_.rend(); ++it)
    acc = acc * t + *it;
  return x * acc;
}

double OddPolynomial::derivative(double x) const {
  // p'(x) = sum (2k-1) a_{2k-1} x^{2k-2}: even polynomial, Horner in x^2.
  const double t = x * x;
  const std::size_t d = coeffs_.size();
  double acc = static_cast<double>(2 * d - 1) * coeffs_[d - 1];
  for (std::size_t k = d - 1; k-- > 0;)
    acc = acc * t + static_cast<double>(2 * k + 1) * coeffs_[k];
  return acc;
}

Composition::Composition(std::vector<OddPolynomial> polys)
    : polys_(std::move(polys)) {
  if (polys_.empty())
    throw std::invalid_argument("Composition: needs at least one polynomial");
}

double Composition::operator()(double x) const {
  for (const auto& p : polys_) x = p(x);
  return x;
}

double Composition::derivative_at_zero() const {
  double prod = 1.0;
  for (const auto& p : polys_) prod *= p.derivative_at_zero();
  return prod;
}

long Composition::matmul_cost() const {
  long total = 0;
  for (const auto& p : polys_) total += p.matmul_cost();
  return total;
}

namespace {

// Bisect a sign change of p' down to |hi - lo| <= width_tol.
double refine_root(const OddPolynomial& p, double lo, double hi, double flo,
                   double width_tol) {
  for (int i = 0; i < 200 && hi - lo > width_tol; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fmid = p.derivative(mid);
    if (fmid == 0.0) return mid;
    if ((flo < 0.0) == (fmid < 0.0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

std::vector<double> critical_points(const OddPolynomial& p, double a,
                                    double b) {
  if (!(a < b)) throw std::invalid_argument("critical_points: need a < b");
  constexpr std::size_t kScan = 4096;
  const double width_tol = 1e-14 * std::abs(b);
  std::vector<double> roots;
  double x_prev = a;
  double f_prev = p.derivative(a);
  for (std::size_t i = 1; i <= kScan; ++i) {
    const double x = a + (b - a) * static_cast<double>(i) /
                             static_cast<double>(kScan);
    const double f = p.derivative(x);
    if (f_prev == 0.0) {
      if (x_prev > a && x_prev < b) roots.push_back(x_prev);
    } else if ((f_prev < 0.0) != (f < 0.0)) {
      roots.push_back(refine_root(p, x_prev, x, f_prev, width_tol));
    }
    x_prev = x;
    f_prev = f;
  }
  roots.erase(std::remove_if(roots.begin(), roots.end(),
                             [&](double r) { return r <= a || r >= b; }),
              roots.end());
  std::sort(roots.begin(), roots.end());
  return roots;
}

std::pair<double, double> range_on_interval(const OddPolynomial& p, double a,
                                            double b, std::size_t grid_size) {
  if (!(a >= 0.0 && a < b))
    throw std::invalid_argument("range_on_interval: need 0 <= a < b");
  if (grid_size < 2)
    throw std::invalid_argument("range_on_interval: grid_size >= 2");
  double lo = p(a), hi = p(a);
  auto visit = [&](double x) {
    const double v = p(x);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  };
  for (std::size_t i = 1; i < grid_size; ++i)
    visit(a + (b - a) * static_cast<double>(i) /
                  static_cast<double>(grid_size - 1));
  for (double r : critical_points(p, a, b)) visit(r);
  return {lo, hi};
}

}  // namespace cans
