#include "cans/minimax.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <vector>

#include "cans/errors.hpp"

namespace cans {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

// ---- double-double helpers (Dekker/Knuth, fma-based products) ----
// Used where a monomial-coefficient recovery would otherwise lose digits.

struct DD {
  double hi = 0.0;
  double lo = 0.0;
};

DD two_sum(double a, double b) {
  const double s = a + b;
  const double bb = s - a;
  return {s, (a - (s - bb)) + (b - bb)};
}

DD quick_two_sum(double a, double b) {  // |a| >= |b|
  const double s = a + b;
  return {s, b - (s - a)};
}

DD two_prod(double a, double b) {
  const double p = a * b;
  return {p, std::fma(a, b, -p)};
}

DD dd_add(DD a, DD b) {
  DD s = two_sum(a.hi, b.hi);
  const double e = s.lo + a.lo + b.lo;
  return quick_two_sum(s.hi, e);
}

DD dd_mul(DD a, DD b) {
  DD p = two_prod(a.hi, b.hi);
  p.lo += a.hi * b.lo + a.lo * b.hi;
  return quick_two_sum(p.hi, p.lo);
}

DD dd_mul(DD a, double b) { return dd_mul(a, DD{b, 0.0}); }

DD dd_div(DD a, DD b) {
  const double q0 = a.hi / b.hi;
  DD r = dd_add(a, dd_mul(b, DD{-q0, 0.0}));
  const double q1 = r.hi / b.hi;
  r = dd_add(r, dd_mul(b, DD{-q1, 0.0}));
  const double q2 = r.hi / b.hi;
  DD q = quick_two_sum(q0, q1);
  return dd_add(q, DD{q2, 0.0});
}

// ---- dense LU with partial pivoting for the small alternance system ----

struct Lu {
  std::vector<double> m;  // n x n, factored in place
  std::vector<int> piv;
  int n = 0;
  double cond_proxy = 0.0;  // max |pivot| / min |pivot|
};

Lu lu_factor(std::vector<double> m, int n) {
  Lu f{std::move(m), std::vector<int>(static_cast<std::size_t>(n)), n, 0.0};
  double pmax = 0.0, pmin = std::numeric_limits<double>::infinity();
  for (int c = 0; c < n; ++c) {
    int best = c;
    double best_abs = std::abs(f.m[static_cast<std::size_t>(c) * n + c]);
    for (int r = c + 1; r < n; ++r) {
      const double v = std::abs(f.m[static_cast<std::size_t>(r) * n + c]);
      if (v > best_abs) {
        best_abs = v;
        best = r;
      }
    }
    if (best_abs == 0.0)
      throw NumericError("alternance system is singular");
    f.piv[static_cast<std::size_t>(c)] = best;
    if (best != c)
      for (int j = 0; j < n; ++j)
        std::swap(f.m[static_cast<std::size_t>(c) * n + j],
                  f.m[static_cast<std::size_t>(best) * n + j]);
    const double pivot = f.m[static_cast<std::size_t>(c) * n + c];
    pmax = std::max(pmax, std::abs(pivot));
    pmin = std::min(pmin, std::abs(pivot));
    for (int r = c + 1; r < n; ++r) {
      const double mult = f.m[static_cast<std::size_t>(r) * n + c] / pivot;
      f.m[static_cast<std::size_t>(r) * n + c] = mult;
      for (int j = c + 1; j < n; ++j)
        f.m[static_cast<std::size_t>(r) * n + j] -=
            mult * f.m[static_cast<std::size_t>(c) * n + j];
    }
  }
  f.cond_proxy = pmax / pmin;
  return f;
}

std::vector<double> lu_solve(const Lu& f, std::vector<double> rhs) {
  const int n = f.n;
  // The factorization swaps whole rows (multiplier columns included), so the
  // entire permutation must be applied before the forward solve; interleaving
  // swaps with elimination would pair later-swapped multipliers with
  // not-yet-swapped right-hand-side entries.
  for (int c = 0; c < n; ++c)
    std::swap(rhs[static_cast<std::size_t>(c)],
              rhs[static_cast<std::size_t>(f.piv[static_cast<std::size_t>(c)])]);
  for (int c = 0; c < n; ++c) {
    for (int r = c + 1; r < n; ++r)
      rhs[static_cast<std::size_t>(r)] -=
          f.m[static_cast<std::size_t>(r) * n + c] *
          rhs[static_cast<std::size_t>(c)];
  }
  for (int r = n - 1; r >= 0; --r) {
    double v = rhs[static_cast<std::size_t>(r)];
    for (int j = r + 1; j < n; ++j)
      v -= f.m[static_cast<std::size_t>(r) * n + j] *
           rhs[static_cast<std::size_t>(j)];
    rhs[static_cast<std::size_t>(r)] = v / f.m[static_cast<std::size_t>(r) * n + r];
  }
  return rhs;
}

// Compensated Horner in u = x^2 on the double-double monomial coefficients,
// returning p(x) - 1 with the subtraction also performed in double-double.
// Deviations from 1 are the quantity every certificate needs; forming them
// from a rounded p(x) would floor at an ulp of 1 (~1e-16 absolute), which is
// coarser than the levels of narrow intervals.  This keeps residual and
// defect measurements about the solve itself, not the final rounding.
double dd_eval_odd_minus1(const std::vector<DD>& mono, double x) {
  const DD u = two_prod(x, x);
  DD acc = mono.back();
  for (std::size_t i = mono.size() - 1; i-- > 0;)
    acc = dd_add(dd_mul(acc, u), mono[i]);
  return dd_add(dd_mul(acc, DD{x, 0.0}), DD{-1.0, 0.0}).hi;
}

struct AlternanceSolution {
  std::vector<DD> mono;  // monomial coefficients of the odd terms
  double eps = 0.0;      // signed level: p(x_j) = 1 - (-1)^j * eps
};

AlternanceSolution solve_alternance_dd(std::span<const double> points) {
  const int m = static_cast<int>(points.size());
  require(m >= 2, "solve_alternance_system: need at least 2 points");
  const int n = m - 1;  // odd-term count
  require(points[0] > 0.0, "solve_alternance_system: points must be positive");
  for (int j = 1; j < m; ++j)
    require(points[static_cast<std::size_t>(j)] >
                points[static_cast<std::size_t>(j - 1)],
            "solve_alternance_system: points must be strictly increasing");

  // Substituting u = x^2, p(x) = x * r(u) with deg r = n-1; expand r in
  // Chebyshev polynomials mapped onto [u_min, u_max].  This keeps the system
  // well conditioned where a raw odd Vandermonde would not be.
  const double u_min = points[0] * points[0];
  const double u_max = points[static_cast<std::size_t>(n)] *
                       points[static_cast<std::size_t>(n)];
  const double u_span = u_max - u_min;
  const double u_sum = u_max + u_min;
  const DD q = dd_div(DD{2.0, 0.0}, DD{u_span, 0.0});
  const DD off = dd_div(DD{-u_sum, 0.0}, DD{u_span, 0.0});

  // The matrix is held in double-double and built with exactly the same
  // affine map (q, off) as the monomial recovery below.  Forming y in plain
  // double cancels catastrophically on narrow intervals (|q*u| ~ |off| >> 1),
  // which would make the system refer to perturbed reference points and floor
  // the achievable equioscillation error far above the target defect.
  std::vector<DD> mat_dd(static_cast<std::size_t>(m) * m);
  for (int j = 0; j < m; ++j) {
    const double x = points[static_cast<std::size_t>(j)];
    const DD y = dd_add(dd_mul(q, two_prod(x, x)), off);
    DD t_prev{1.0, 0.0}, t_cur = y;
    for (int k = 0; k < n; ++k) {
      const DD tk = (k == 0) ? DD{1.0, 0.0} : t_cur;
      mat_dd[static_cast<std::size_t>(j) * m + k] = dd_mul(tk, x);
      if (k >= 1) {
        const DD t_next =
            dd_add(dd_mul(dd_mul(y, t_cur), 2.0), DD{-t_prev.hi, -t_prev.lo});
        t_prev = t_cur;
        t_cur = t_next;
      }
    }
    mat_dd[static_cast<std::size_t>(j) * m + n] =
        (j % 2 == 0) ? DD{1.0, 0.0} : DD{-1.0, 0.0};
  }

  std::vector<double> mat(static_cast<std::size_t>(m) * m);
  for (std::size_t i = 0; i < mat.size(); ++i) mat[i] = mat_dd[i].hi;
  Lu f = lu_factor(std::move(mat), m);
  if (!(f.cond_proxy < 1e15))
    throw NumericError(
        "alternance system too ill-conditioned (degree too high for this "
        "interval)");

  const std::vector<double> sol0 = lu_solve(
      f, std::vector<double>(static_cast<std::size_t>(m), 1.0));
  // Compensated-residual iterative refinement with the solution itself held
  // in double-double: a plain-double solution can only satisfy the
  // equioscillation equations to ~1e-16 absolute, which caps the relative
  // defect at ~1e-16/eps and stalls convergence on narrow intervals where
  // eps is tiny.
  std::vector<DD> sol(static_cast<std::size_t>(m));
  for (int k = 0; k < m; ++k)
    sol[static_cast<std::size_t>(k)] = DD{sol0[static_cast<std::size_t>(k)], 0.0};
  for (int pass = 0; pass < 4; ++pass) {
    std::vector<double> resid(static_cast<std::size_t>(m));
    double rmax = 0.0;
    for (int j = 0; j < m; ++j) {
      DD acc{1.0, 0.0};
      for (int k = 0; k < m; ++k) {
        const DD& e = mat_dd[static_cast<std::size_t>(j) * m + k];
        acc = dd_add(acc, dd_mul(sol[static_cast<std::size_t>(k)],
                                 DD{-e.hi, -e.lo}));
      }
      resid[static_cast<std::size_t>(j)] = acc.hi;
      rmax = std::max(rmax, std::abs(acc.hi));
    }
    if (std::getenv("CANS_DEBUG_ALT"))
      std::fprintf(stderr, "[alt] m=%d pass=%d rmax=%.3e cond=%.3e\n", m, pass,
                   rmax, f.cond_proxy);
    if (rmax < 1e-28) break;
    const std::vector<double> delta = lu_solve(f, std::move(resid));
    for (int k = 0; k < m; ++k)
      sol[static_cast<std::size_t>(k)] =
          dd_add(sol[static_cast<std::size_t>(k)],
                 DD{delta[static_cast<std::size_t>(k)], 0.0});
  }

  const double eps = sol[static_cast<std::size_t>(n)].hi;

  // Monomial recovery in double-double: expand r(u) = sum c_k T_k(y(u)) with
  // the same map y(u) = q*u + off the system was built from.
  std::vector<std::vector<DD>> cheb;  // T_k(y(u)) as u-monomial coefficients
  cheb.push_back({DD{1.0, 0.0}});
  if (n >= 2) cheb.push_back({off, q});
  for (int k = 2; k < n; ++k) {
    const std::vector<DD>& tk = cheb[static_cast<std::size_t>(k - 1)];
    std::vector<DD> next(tk.size() + 1);
    for (std::size_t i = 0; i < tk.size(); ++i) {
      next[i] = dd_add(next[i], dd_mul(tk[i], dd_mul(off, 2.0)));
      next[i + 1] = dd_add(next[i + 1], dd_mul(tk[i], dd_mul(q, 2.0)));
    }
    const std::vector<DD>& tkm = cheb[static_cast<std::size_t>(k - 2)];
    for (std::size_t i = 0; i < tkm.size(); ++i)
      next[i] = dd_add(next[i], dd_mul(tkm[i], -1.0));
    cheb.push_back(std::move(next));
  }
  std::vector<DD> mono(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k)
    for (std::size_t i = 0; i < cheb[static_cast<std::size_t>(k)].size(); ++i)
      mono[i] = dd_add(mono[i], dd_mul(cheb[static_cast<std::size_t>(k)][i],
                                       sol[static_cast<std::size_t>(k)]));
  for (const DD& c : mono)
    if (!std::isfinite(c.hi))
      throw NumericError("alternance system produced non-finite coefficients");

  // Residual of the functional equations, measured on the unrounded solution:
  // p(x_j) - 1 should equal -(+/-eps) with alternating sign.
  double resid_fn = 0.0;
  for (int j = 0; j < m; ++j) {
    const double dev =
        dd_eval_odd_minus1(mono, points[static_cast<std::size_t>(j)]);
    resid_fn = std::max(resid_fn,
                        std::abs(dev + ((j % 2 == 0) ? eps : -eps)));
  }
  if (std::getenv("CANS_DEBUG_ALT"))
    std::fprintf(stderr, "[alt] m=%d resid_fn=%.3e eps=%.6g\n", m, resid_fn,
                 eps);
  if (!(resid_fn <= 1e-10 * (1.0 + std::abs(eps)))) {
    char msg[160];
    std::snprintf(msg, sizeof(msg),
                  "alternance system residual %.3e exceeds tolerance (degree "
                  "too high for this interval; condition proxy %.3e)",
                  resid_fn, f.cond_proxy);
    throw NumericError(msg);
  }
  return {std::move(mono), eps};
}

OddPolynomial round_to_poly(const AlternanceSolution& s) {
  std::vector<double> coeffs(s.mono.size());
  for (std::size_t k = 0; k < s.mono.size(); ++k) coeffs[k] = s.mono[k].hi;
  return OddPolynomial(coeffs);
}

}  // namespace

double epsilon_cubic_half_width(double h) {
  require(std::isfinite(h) && h >= 0.0 && h <= 1.0,
          "epsilon_cubic_half_width: need 0 <= h <= 1");
  const double h2 = h * h;
  const double grow = std::expm1(1.5 * std::log1p(h2 / 3.0));
  return (grow + h2) / (grow + 2.0 - h2);
}

double epsilon_cubic(double a, double b) {
  require(std::isfinite(a) && std::isfinite(b) && a > 0.0 && a <= b,
          "epsilon_cubic: need 0 < a <= b");
  // Scale-invariant reduction to [1-h, 1+h]; expm1/log1p keeps the numerator
  // fully accurate when the interval is narrow.
  return epsilon_cubic_half_width((b - a) / (a + b));
}

MinimaxResult best_cubic(double a, double b) {
  require(std::isfinite(a) && std::isfinite(b) && a > 0.0 && a <= b,
          "best_cubic: need 0 < a <= b");
  const double s = (a * a + a * b + b * b) / 3.0;
  const double e = std::sqrt(s);
  const double denom = 2.0 * s * e + a * b * (a + b);
  MinimaxResult r{OddPolynomial({6.0 * s / denom, -2.0 / denom}),
                  epsilon_cubic(a, b),
                  {a, e, b},
                  a,
                  b,
                  true,
                  0};
  return r;
}

std::pair<OddPolynomial, double> solve_alternance_system(
    std::span<const double> points) {
  AlternanceSolution s = solve_alternance_dd(points);
  return {round_to_poly(s), s.eps};
}

MinimaxResult remez(double a, double b, int n, double tol, int max_iter) {
  require(std::isfinite(a) && std::isfinite(b) && a > 0.0 && a < b,
          "remez: need 0 < a < b");
  require(n >= 1 && n <= 8, "remez: need 1 <= n <= 8");
  require(tol > 0.0, "remez: tol must be positive");
  require(max_iter >= 1, "remez: max_iter must be >= 1");

  const double c = 0.5 * (a + b), r = 0.5 * (b - a);
  std::vector<double> ref(static_cast<std::size_t>(n) + 1);
  for (int j = 0; j <= n; ++j)
    ref[static_cast<std::size_t>(j)] =
        c + r * std::cos(M_PI * static_cast<double>(n - j) /
                         static_cast<double>(n));
  ref.front() = a;
  ref.back() = b;

  MinimaxResult best{OddPolynomial({1.0}), 0.0, {}, a, b, false, 0};
  double best_defect = std::numeric_limits<double>::infinity();

  for (int iter = 1; iter <= max_iter; ++iter) {
    const AlternanceSolution sol = solve_alternance_dd(ref);
    const OddPolynomial p = round_to_poly(sol);
    const double eps = std::abs(sol.eps);
    if (eps == 0.0) throw NumericError("remez: degenerate level");

    // Extrema of |p - 1| on [a, b] sit at the endpoints and the interior
    // critical points of p, so the sup is exact up to root refinement.  The
    // defect is measured on the unrounded iterate: it certifies the exchange,
    // not the final rounding of the coefficients to doubles.
    std::vector<double> crit = critical_points(p, a, b);
    double sup = std::max(std::abs(dd_eval_odd_minus1(sol.mono, a)),
                          std::abs(dd_eval_odd_minus1(sol.mono, b)));
    for (double x : crit)
      sup = std::max(sup, std::abs(dd_eval_odd_minus1(sol.mono, x)));
    const double defect = sup / eps - 1.0;

    if (defect < best_defect) {
      best_defect = defect;
      best = MinimaxResult{p, eps, ref, a, b, false, iter};
    }
    if (defect <= tol) {
      best.converged = true;
      return best;
    }
    if (static_cast<int>(crit.size()) != n - 1) break;  // degenerate exchange

    std::vector<double> next;
    next.reserve(static_cast<std::size_t>(n) + 1);
    next.push_back(a);
    next.insert(next.end(), crit.begin(), crit.end());
    next.push_back(b);
    ref = std::move(next);
  }
  return best;  // converged == false: best iterate found
}

double minimax_epsilon(int n, double a, double b) {
  require(n >= 1 && n <= 8, "minimax_epsilon: need 1 <= n <= 8");
  require(a > 0.0 && a <= b, "minimax_epsilon: need 0 < a <= b");
  if (a == b) return 0.0;
  if (n == 1) return (b - a) / (a + b);
  if (n == 2) return epsilon_cubic(a, b);
  return remez(a, b, n).epsilon;
}

MinimaxResult minimax_solve(int n, double a, double b) {
  require(n >= 1 && n <= 8, "minimax_solve: need 1 <= n <= 8");
  require(a > 0.0 && a <= b, "minimax_solve: need 0 < a <= b");
  if (a == b) return best_cubic(a, b);  // limit polynomial fixing x = a
  if (n == 1) {
    MinimaxResult r{OddPolynomial({2.0 / (a + b)}),
                    (b - a) / (a + b),
                    {a, b},
                    a,
                    b,
                    true,
                    0};
    return r;
  }
  if (n == 2) return best_cubic(a, b);
  return remez(a, b, n);
}

}  // namespace cans
