#pragma once

#include <span>
#include <vector>

#include "cans/minimax.hpp"
#include "cans/poly.hpp"

namespace cans {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// One stage of an iteration schedule: the optimal polynomial for the stage's
// input interval, the interval it certifies on output, and its minimax error.
struct ScheduleEntry {
  OddPolynomial poly;
  Interval pre;   // singular values assumed in [pre.lo, pre.hi]
  Interval post;  // mapped into [1-epsilon, 1+epsilon]
  double epsilon = 0.0;
};

struct Schedule {
  std::vector<ScheduleEntry> entries;
  long total_matmuls = 0;  // degree 2d-1 costs d multiplies (Gram + d-1)

  Interval final_interval() const;
  Composition composition() const;
};

// Exact-bounds chain: stage k solves the minimax problem on the current
// interval (odd degree from `degrees`), the next interval is
// [1-eps_k, 1+eps_k].  Degrees must be odd and in [3, 15]; requires
// 0 < a <= b.
Schedule cans_schedule(double a, double b, std::span<const int> degrees);

// eps_1 = eps(2, a0, b0), then eps_{k+1} = eps(2, 1-eps_k, 1+eps_k).
// Returns [eps_1, ..., eps_steps].
std::vector<double> epsilon_recursion(double a0, double b0, int steps);

// ceil(log2(ln eps / ln(1 - a0))), floored at 0: iteration-count bound for the
// exact degree-3 chain started at [a0, 1].  Requires 0 < a0 < 1, 0 < eps < 1.
int predicted_iterations(double a0, double eps);

// q_{d,delta}: the d-term minimax polynomial on [a(d,delta), 1+delta] where
// the left endpoint is chosen so the minimax error equals delta (bisection,
// |eps - delta| <= 1e-10).  Among target-delta polynomials it maximizes the
// slope at the origin.
MinimaxResult max_derivative_poly(int d, double delta);

// Back-chained composition design: delta_0 = delta and delta_{k} solves
// eps(d, 1-delta_k, 1+delta_k) = delta_{k-1}; the innermost polynomial is
// rescaled so the composition is applied on [a_star, 1+delta].
struct BackchainResult {
  Composition comp;            // innermost first, innermost already rescaled
  std::vector<double> deltas;  // delta_1 .. delta_l (outermost..innermost)
  double a_star = 0.0;         // left end of the certified input interval
  double delta = 0.0;
};

BackchainResult backchained_schedule(int d, int l, double delta);

// delta-orthogonalization design: bisect the left interval boundary until the
// chained minimax error through `degrees` lands within eps_tol of delta.
struct DeltaDesign {
  Schedule schedule;
  double a_reach = 0.0;   // smallest left boundary certified by the design
  double delta = 0.0;
  double residual = 0.0;  // |delta - final eps| at termination
};

// B defaults to 1 + delta when non-positive.  Throws NumericError if the
// bisection does not land within eps_tol of delta in 200 steps.
DeltaDesign delta_design(double delta, std::span<const int> degrees,
                         double B = -1.0, double eps_tol = 1e-7);

}  // namespace cans
