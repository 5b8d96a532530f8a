#pragma once

#include <span>
#include <utility>
#include <vector>

#include "cans/poly.hpp"

namespace cans {

// Best uniform approximation of the constant 1 on [a, b] by an odd polynomial
// with n terms, together with its equioscillation data.
struct MinimaxResult {
  OddPolynomial poly;
  double epsilon = 0.0;            // max_{[a,b]} |p(x) - 1|
  std::vector<double> alternance;  // n+1 points, a = first, b = last
  double a = 0.0;
  double b = 0.0;
  bool converged = true;
  int iterations = 0;
};

// Minimax error of the best odd cubic on [a, b] in closed form.
// Requires 0 < a <= b; returns 0 when a == b.  Evaluated through the
// scale-reduced symmetric interval [1-h, 1+h], h = (b-a)/(a+b), so it is
// stable down to vanishing interval widths (no cancellation).
double epsilon_cubic(double a, double b);

// Error of the optimal cubic on the symmetric band [1-h, 1+h], taking the
// half-width directly.  Below h ~ 1e-16 the endpoints 1 +- h are not
// representable as distinct doubles, so recursions that track residual bands
// must use this form instead of epsilon_cubic(1-h, 1+h).
double epsilon_cubic_half_width(double h);

// Closed-form optimal odd cubic on [a, b] (n = 2).  For a == b returns the
// limit polynomial normalized so p(a) = 1 and p'(a) = 0; at a == b == 1 this
// is exactly (1.5, -0.5).
MinimaxResult best_cubic(double a, double b);

// Solves the (n+1)x(n+1) alternance system p(x_j) = 1 - (-1)^j * eps for the
// odd polynomial p with n terms and the signed level eps, given n+1 strictly
// increasing positive points.  Gaussian elimination with partial pivoting on a
// Chebyshev-basis formulation; throws NumericError when the system is too
// ill-conditioned (degree too high for the interval) or the functional
// residual exceeds 1e-10*(1+|eps|).
std::pair<OddPolynomial, double> solve_alternance_system(
    std::span<const double> points);

// Remez exchange for the n-term odd minimax polynomial on [a, b].
// Requires 0 < a < b and 1 <= n <= 8.  Initial reference: Chebyshev points of
// the second kind mapped to [a, b]; full exchange against the interior extrema
// of the current iterate with both endpoints kept.  Converged when
// max|p - 1| / eps - 1 <= tol.  Non-convergence returns the best iterate with
// converged = false.
MinimaxResult remez(double a, double b, int n, double tol = 1e-12,
                    int max_iter = 100);

// eps(n, a, b) through the cheapest applicable route (closed forms for
// n <= 2, Remez otherwise).
double minimax_epsilon(int n, double a, double b);

// Minimax solve dispatch used by schedule builders: closed form for n == 2,
// Remez for n >= 3.
MinimaxResult minimax_solve(int n, double a, double b);

}  // namespace cans
