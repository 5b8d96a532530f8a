#include "cans/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cans/errors.hpp"

namespace cans {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

int term_count_for_degree(int degree) {
  require(degree >= 3 && degree <= 15 && degree % 2 == 1,
          "schedule: degrees must be odd and within [3, 15]");
  return (degree + 1) / 2;
}

}  // namespace

Interval Schedule::final_interval() const {
  if (entries.empty()) return {0.0, 0.0};
  return entries.back().post;
}

Composition Schedule::composition() const {
  std::vector<OddPolynomial> ps;
  ps.reserve(entries.size());
  for (const auto& e : entries) ps.push_back(e.poly);
  return Composition(std::move(ps));
}

Schedule cans_schedule(double a, double b, std::span<const int> degrees) {
  require(a > 0.0 && a <= b && std::isfinite(b), "cans_schedule: need 0 < a <= b");
  require(!degrees.empty(), "cans_schedule: empty degree list");
  Schedule s;
  double lo = a, hi = b;
  for (int degree : degrees) {
    const int n = term_count_for_degree(degree);
    // a == b collapses every stage to the limit cubic that fixes the point.
    MinimaxResult r = minimax_solve(n, lo, hi);
    ScheduleEntry e{r.poly, {lo, hi}, {1.0 - r.epsilon, 1.0 + r.epsilon},
                    r.epsilon};
    s.total_matmuls += e.poly.matmul_cost();
    s.entries.push_back(std::move(e));
    lo = 1.0 - r.epsilon;
    hi = 1.0 + r.epsilon;
  }
  return s;
}

std::vector<double> epsilon_recursion(double a0, double b0, int steps) {
  require(a0 > 0.0 && a0 <= b0, "epsilon_recursion: need 0 < a0 <= b0");
  require(steps >= 1, "epsilon_recursion: steps >= 1");
  std::vector<double> eps;
  eps.reserve(static_cast<std::size_t>(steps));
  double e = epsilon_cubic(a0, b0);
  eps.push_back(e);
  for (int i = 1; i < steps; ++i) {
    // Track the band half-width directly: materializing [1-e, 1+e] would
    // collapse to [1, 1] once e drops under the spacing of doubles near 1.
    e = epsilon_cubic_half_width(e);
    eps.push_back(e);
  }
  return eps;
}

int predicted_iterations(double a0, double eps) {
  require(a0 > 0.0 && a0 < 1.0, "predicted_iterations: need 0 < a0 < 1");
  require(eps > 0.0 && eps < 1.0, "predicted_iterations: need 0 < eps < 1");
  const double ratio = std::log(eps) / std::log(1.0 - a0);
  if (ratio <= 1.0) return 0;
  const int n = static_cast<int>(std::ceil(std::log2(ratio)));
  return std::max(n, 0);
}

MinimaxResult max_derivative_poly(int d, double delta) {
  require(d >= 2 && d <= 8, "max_derivative_poly: need 2 <= d <= 8");
  require(delta > 0.0 && delta < 1.0,
          "max_derivative_poly: need 0 < delta < 1");
  const double b = 1.0 + delta;
  // eps(d, a, b) decreases from 1 to 0 as a sweeps (0, b); bisect on a.
  auto eps_at = [&](double a) { return minimax_epsilon(d, a, b); };
  double hi = b * (1.0 - 1e-12);
  double lo = hi * 0.5;
  while (eps_at(lo) <= delta) {
    lo *= 0.5;
    if (lo < 1e-300)
      throw NumericError("max_derivative_poly: failed to bracket");
  }
  double mid = lo;
  for (int it = 0; it < 300; ++it) {
    mid = 0.5 * (lo + hi);
    const double e = eps_at(mid);
    if (std::abs(e - delta) <= 1e-10) break;
    if (e > delta)
      lo = mid;
    else
      hi = mid;
  }
  MinimaxResult r = minimax_solve(d, mid, b);
  if (std::abs(r.epsilon - delta) > 1e-8)
    throw NumericError("max_derivative_poly: bisection did not settle");
  return r;
}

BackchainResult backchained_schedule(int d, int l, double delta) {
  require(d >= 2 && d <= 8, "backchained_schedule: need 2 <= d <= 8");
  require(l >= 1, "backchained_schedule: need l >= 1");
  require(delta > 0.0 && delta < 1.0,
          "backchained_schedule: need 0 < delta < 1");

  // delta_{k} solves eps(d, 1-x, 1+x) = delta_{k-1}; eps is increasing in x.
  auto solve_width = [&](double target) {
    double lo = 0.0, hi = 1.0 - 1e-12;
    if (!(minimax_epsilon(d, 1.0 - hi, 1.0 + hi) > target))
      throw NumericError(
          "backchained_schedule: target interval unreachable (l too large)");
    double mid = 0.5;
    for (int it = 0; it < 200; ++it) {
      mid = 0.5 * (lo + hi);
      const double e = minimax_epsilon(d, 1.0 - mid, 1.0 + mid);
      if (std::abs(e - target) <= 1e-10) break;
      if (e < target)
        lo = mid;
      else
        hi = mid;
    }
    return mid;
  };

  std::vector<double> deltas;  // delta_1 .. delta_l
  deltas.reserve(static_cast<std::size_t>(l));
  double cur = delta;
  for (int k = 0; k < l; ++k) {
    cur = solve_width(cur);
    deltas.push_back(cur);
  }

  std::vector<OddPolynomial> stages;  // innermost first: p_l, ..., p_1
  stages.reserve(static_cast<std::size_t>(l));
  for (int k = l; k >= 1; --k) {
    const double dk = deltas[static_cast<std::size_t>(k - 1)];
    stages.push_back(minimax_solve(d, 1.0 - dk, 1.0 + dk).poly);
  }

  // Rescale the innermost stage so the composition's domain ends at 1+delta:
  // g(x) = f(t x), t = (1+delta_l)/(1+delta), absorbed into the coefficients.
  const double dl = deltas.back();
  const double t = (1.0 + dl) / (1.0 + delta);
  std::vector<double> inner = stages.front().coeffs();
  double tp = t;
  for (auto& c : inner) {
    c *= tp;
    tp *= t * t;
  }
  stages.front() = OddPolynomial(std::move(inner));

  BackchainResult out{Composition(std::move(stages)), std::move(deltas),
                      (1.0 - dl) / t, delta};
  return out;
}

DeltaDesign delta_design(double delta, std::span<const int> degrees, double B,
                         double eps_tol) {
  require(delta > 0.0 && delta < 1.0, "delta_design: need 0 < delta < 1");
  require(!degrees.empty(), "delta_design: empty degree list");
  require(eps_tol > 0.0, "delta_design: eps_tol must be positive");
  if (B <= 0.0) B = 1.0 + delta;

  std::vector<int> terms;
  terms.reserve(degrees.size());
  for (int degree : degrees) terms.push_back(term_count_for_degree(degree));

  // Chained eps through the degree list as a function of the left boundary;
  // decreasing in a, so bisection brackets the delta level set.
  auto chain = [&](double a) {
    Schedule s;
    double lo = a, hi = B;
    for (int n : terms) {
      MinimaxResult r = minimax_solve(n, lo, hi);
      s.total_matmuls += r.poly.matmul_cost();
      s.entries.push_back(ScheduleEntry{
          r.poly, {lo, hi}, {1.0 - r.epsilon, 1.0 + r.epsilon}, r.epsilon});
      lo = 1.0 - r.epsilon;
      hi = 1.0 + r.epsilon;
    }
    return s;
  };

  double a_lo = 0.0, a_hi = B;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (a_lo + a_hi);
    Schedule s = chain(mid);
    const double eps = s.entries.back().epsilon;
    const double resid = std::abs(delta - eps);
    if (resid <= eps_tol) {
      // Certified final interval is the design target.
      s.entries.back().post = {1.0 - delta, 1.0 + delta};
      return DeltaDesign{std::move(s), mid, delta, resid};
    }
    if (eps < delta)
      a_hi = mid;
    else
      a_lo = mid;
  }
  throw NumericError("delta_design: bisection did not reach eps_tol in 200 steps");
}

}  // namespace cans
