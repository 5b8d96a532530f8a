#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "cans/errors.hpp"
#include "cans/minimax.hpp"
#include "test_support.hpp"

using cans::best_cubic;
using cans::epsilon_cubic;
using cans::minimax_epsilon;
using cans::minimax_solve;
using cans::MinimaxResult;
using cans::remez;
using cans::solve_alternance_system;

TEST_CASE("epsilon_cubic closed form") {
  CHECK(epsilon_cubic(1.0, 1.0) == 0.0);
  CHECK(epsilon_cubic(0.5, 1.0) == doctest::Approx(0.085952).epsilon(2e-5));
  // Independent brute-force oracle.
  const auto oracle = test_support::cubic_minimax_oracle(0.5, 1.0);
  CHECK(epsilon_cubic(0.5, 1.0) == doctest::Approx(oracle.eps).epsilon(1e-4));
}

TEST_CASE("epsilon_cubic is exactly scale invariant") {
  CHECK(epsilon_cubic(0.5, 1.0) == epsilon_cubic(0.05, 0.1));
  CHECK(epsilon_cubic(0.3, 1.7) == epsilon_cubic(3.0, 17.0));
}

TEST_CASE("epsilon_cubic stays accurate on vanishing widths") {
  // For [1-h, 1+h], eps = (3/4) h^2 + O(h^4); no cancellation allowed.
  // (Explicit relative bound: the values are far below 1, so a plain
  // Approx comparison would be vacuous.)
  for (double h : {1e-4, 1e-6, 1e-8}) {
    const double eps = epsilon_cubic(1.0 - h, 1.0 + h);
    CHECK(std::abs(eps - 0.75 * h * h) <= 1e-3 * 0.75 * h * h);
  }
}

TEST_CASE("best_cubic limit at a == b == 1 is the classical polynomial") {
  const MinimaxResult r = best_cubic(1.0, 1.0);
  CHECK(r.poly.coeffs() == std::vector<double>{1.5, -0.5});
  CHECK(r.epsilon == 0.0);
}

TEST_CASE("best_cubic(0.5, 1) equioscillates at the closed-form points") {
  const MinimaxResult r = best_cubic(0.5, 1.0);
  CHECK(r.poly.coeffs()[0] == doctest::Approx(2.13278).epsilon(1e-5));
  CHECK(r.poly.coeffs()[1] == doctest::Approx(-1.21873).epsilon(1e-5));
  const double eps = r.epsilon;
  // Interior peak at e = sqrt((a^2+ab+b^2)/3).
  const double e = std::sqrt((0.25 + 0.5 + 1.0) / 3.0);
  CHECK(e == doctest::Approx(0.763763).epsilon(1e-6));
  CHECK(r.poly(0.5) == doctest::Approx(1.0 - eps).epsilon(1e-12));
  CHECK(r.poly(e) == doctest::Approx(1.0 + eps).epsilon(1e-12));
  CHECK(r.poly(1.0) == doctest::Approx(1.0 - eps).epsilon(1e-12));
  REQUIRE(r.alternance.size() == 3);
  CHECK(r.alternance[0] == 0.5);
  CHECK(r.alternance[1] == doctest::Approx(e).epsilon(1e-12));
  CHECK(r.alternance[2] == 1.0);
  // Sup over the interval equals eps: optimality certificate.
  CHECK(test_support::sup_deviation(r.poly, 0.5, 1.0) ==
        doctest::Approx(eps).epsilon(1e-9));
  // Brute-force oracle agrees on coefficients.
  const auto oracle = test_support::cubic_minimax_oracle(0.5, 1.0);
  CHECK(r.poly.coeffs()[0] == doctest::Approx(oracle.c1).epsilon(2e-4));
  CHECK(r.poly.coeffs()[1] == doctest::Approx(oracle.c3).epsilon(2e-4));
}

TEST_CASE("alternance system reproduces the cubic optimum") {
  const double e = std::sqrt((0.25 + 0.5 + 1.0) / 3.0);
  const std::vector<double> pts{0.5, e, 1.0};
  const auto [poly, eps] = solve_alternance_system(pts);
  const MinimaxResult r = best_cubic(0.5, 1.0);
  CHECK(poly.coeffs()[0] == doctest::Approx(r.poly.coeffs()[0]).epsilon(1e-8));
  CHECK(poly.coeffs()[1] == doctest::Approx(r.poly.coeffs()[1]).epsilon(1e-8));
  CHECK(std::abs(eps) == doctest::Approx(r.epsilon).epsilon(1e-8));
}

TEST_CASE("alternance system input validation") {
  CHECK_THROWS_AS(solve_alternance_system(std::vector<double>{0.5, 0.5, 1.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(solve_alternance_system(std::vector<double>{-0.1, 0.5, 1.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(solve_alternance_system(std::vector<double>{0.5}),
                  std::invalid_argument);
}

TEST_CASE("remez(0.5, 1, 2) matches the closed form to 1e-10") {
  const MinimaxResult r = remez(0.5, 1.0, 2);
  const MinimaxResult c = best_cubic(0.5, 1.0);
  CHECK(r.converged);
  for (int i = 0; i < 2; ++i)
    CHECK(r.poly.coeffs()[i] ==
          doctest::Approx(c.poly.coeffs()[i]).epsilon(1e-10));
  CHECK(r.epsilon == doctest::Approx(c.epsilon).epsilon(1e-12));
}

TEST_CASE("remez degree-5 beats the cubic and carries a certificate") {
  const MinimaxResult r = remez(0.1, 1.0, 3);
  CHECK(r.converged);
  CHECK(r.epsilon < epsilon_cubic(0.1, 1.0));
  // Equioscillation certificate: n+1 alternating extrema of equal height
  // containing both endpoints proves global optimality.
  REQUIRE(r.alternance.size() == 4);
  CHECK(r.alternance.front() == 0.1);
  CHECK(r.alternance.back() == 1.0);
  double sign = -1.0;  // p(a) = 1 - eps
  for (double x : r.alternance) {
    CHECK(r.poly(x) - 1.0 ==
          doctest::Approx(sign * r.epsilon).epsilon(1e-10));
    sign = -sign;
  }
  CHECK(test_support::sup_deviation(r.poly, 0.1, 1.0) <=
        r.epsilon * (1.0 + 1e-9));
  // Slope lower bound at the origin.
  CHECK(r.poly.derivative_at_zero() >= (1.0 - r.epsilon) / 0.1 * (1 - 1e-12));
}

TEST_CASE("remez scale invariance") {
  for (int n : {2, 3, 4}) {
    const MinimaxResult r1 = minimax_solve(n, 0.1, 1.0);
    const MinimaxResult rt = minimax_solve(n, 0.01, 0.1);  // t = 0.1
    CHECK(rt.epsilon == doctest::Approx(r1.epsilon).epsilon(1e-9));
    // p_{ta,tb}(x) = p_{a,b}(x/t): alpha'_k = alpha_k * t^{-(2k-1)}.
    double tp = 10.0;  // t^{-(2k-1)} for k = 1
    for (int k = 0; k < n; ++k) {
      CHECK(rt.poly.coeffs()[k] ==
            doctest::Approx(r1.poly.coeffs()[k] * tp).epsilon(1e-8));
      tp *= 100.0;
    }
  }
}

TEST_CASE("remez input validation") {
  CHECK_THROWS_AS(remez(0.0, 1.0, 2), std::invalid_argument);
  CHECK_THROWS_AS(remez(1.0, 0.5, 2), std::invalid_argument);
  CHECK_THROWS_AS(remez(0.5, 1.0, 0), std::invalid_argument);
  CHECK_THROWS_AS(remez(0.5, 1.0, 9), std::invalid_argument);
}

TEST_CASE("minimax dispatch closed forms") {
  // n = 1: p(x) = 2x/(a+b), eps = (b-a)/(a+b).
  CHECK(minimax_epsilon(1, 0.5, 1.0) == doctest::Approx(1.0 / 3).epsilon(1e-15));
  const MinimaxResult r1 = minimax_solve(1, 0.5, 1.0);
  CHECK(r1.poly.coeffs()[0] == doctest::Approx(4.0 / 3).epsilon(1e-15));
  // Degenerate interval: zero error.
  CHECK(minimax_epsilon(2, 0.7, 0.7) == 0.0);
  // Dispatch consistency with the iterative solver.
  CHECK(minimax_epsilon(3, 0.2, 1.4) ==
        doctest::Approx(remez(0.2, 1.4, 3).epsilon).epsilon(1e-12));
  const MinimaxResult q1 = remez(0.5, 1.0, 1);
  CHECK(q1.poly.coeffs()[0] == doctest::Approx(4.0 / 3).epsilon(1e-10));
}

TEST_CASE("high term counts on wide intervals still certify") {
  const MinimaxResult r = remez(0.05, 1.0, 6);  // degree 11
  CHECK(r.converged);
  REQUIRE(r.alternance.size() == 7);
  CHECK(test_support::sup_deviation(r.poly, 0.05, 1.0) <=
        r.epsilon * (1.0 + 1e-8));
}
