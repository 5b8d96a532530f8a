// Acceptance harness: one pass/fail line per criterion, exit code equal to
// the number of failed criteria.  Tolerances are pinned inline next to each
// check.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cans/cli.hpp"
#include "cans/engine.hpp"
#include "cans/matrix.hpp"
#include "cans/minimax.hpp"
#include "cans/poly.hpp"
#include "cans/rng.hpp"
#include "cans/schedule.hpp"
#include "cans/stiefel.hpp"
#include "cans/svd.hpp"
#include "test_support.hpp"

using namespace cans;

namespace {

struct Check {
  bool ok = true;
  std::string why;
  void require(bool cond, const std::string& msg) {
    if (!cond && ok) {
      ok = false;
      why = msg;
    }
  }
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

double elapsed_s(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

// ---------------------------------------------------------------------------
// 1. Degree-3 Remez output matches the closed-form cubic on random intervals.

Check criterion1() {
  Check c;
  Xoshiro256pp rng(20260825);
  const auto t0 = std::chrono::steady_clock::now();
  for (int trial = 0; trial < 50; ++trial) {
    const double a = 0.01 + rng.uniform() * (2.0 - 0.01 - 1e-3);
    const double b = a + 1e-3 + rng.uniform() * (2.0 - a - 1e-3);
    const MinimaxResult closed = best_cubic(a, b);
    const MinimaxResult exch = remez(a, b, 2);
    c.require(exch.converged, "remez did not converge on [" + fmt(a) + "," +
                                  fmt(b) + "]");
    for (int k = 0; k < 2; ++k) {
      const double want = closed.poly.coeffs()[k];
      const double got = exch.poly.coeffs()[k];
      c.require(std::abs(got - want) <= 1e-10 * std::abs(want),
                "coefficient " + std::to_string(k) + " off on [" + fmt(a) +
                    "," + fmt(b) + "]: " + fmt(got) + " vs " + fmt(want));
    }
  }
  const double dt = elapsed_s(t0);
  c.require(dt < 5.0, "50 solves took " + fmt(dt) + " s (budget 5 s)");
  return c;
}

// ---------------------------------------------------------------------------
// 2. Degenerate-interval limit: both constructions give (1.5, -0.5).

Check criterion2() {
  Check c;
  const MinimaxResult lim = best_cubic(1.0, 1.0);
  const MinimaxResult q = max_derivative_poly(2, 1e-8);
  for (const MinimaxResult* r : {&lim, &q}) {
    c.require(std::abs(r->poly.coeffs()[0] - 1.5) <= 1e-3,
              "c1 = " + fmt(r->poly.coeffs()[0]) + ", want 1.5 +- 1e-3");
    c.require(std::abs(r->poly.coeffs()[1] + 0.5) <= 1e-3,
              "c3 = " + fmt(r->poly.coeffs()[1]) + ", want -0.5 +- 1e-3");
  }
  return c;
}

// ---------------------------------------------------------------------------
// 3. Quadratic error recursion with asymptotic ratio 3/4.

Check criterion3() {
  Check c;
  const std::vector<double> eps = epsilon_recursion(0.1, 1.0, 8);
  for (std::size_t k = 0; k + 1 < eps.size(); ++k) {
    c.require(eps[k + 1] <= eps[k] * eps[k],
              "eps[" + std::to_string(k + 1) + "] = " + fmt(eps[k + 1]) +
                  " > eps[" + std::to_string(k) + "]^2 = " +
                  fmt(eps[k] * eps[k]));
    if (eps[k] < 1e-2 && eps[k] > 0.0) {
      const double ratio = eps[k + 1] / (eps[k] * eps[k]);
      c.require(std::abs(ratio - 0.75) <= 1e-3,
                "ratio at step " + std::to_string(k) + " = " + fmt(ratio) +
                    ", want 0.75 +- 1e-3");
    }
  }
  return c;
}

// ---------------------------------------------------------------------------
// 4. The exact degree-3 chain meets the predicted iteration count.

Check criterion4() {
  Check c;
  for (double a0 : {0.5, 0.1, 0.01}) {
    for (double eps : {1e-6, 1e-12}) {
      const int n = predicted_iterations(a0, eps);
      const std::vector<double> chain = epsilon_recursion(a0, 1.0, n);
      c.require(chain.back() <= eps,
                "chain from a0=" + fmt(a0) + " reaches only " +
                    fmt(chain.back()) + " after the predicted " +
                    std::to_string(n) + " steps (target " + fmt(eps) + ")");
    }
  }
  return c;
}

// ---------------------------------------------------------------------------
// 5. Equioscillation certificate across degrees 3..11.

Check criterion5() {
  Check c;
  Xoshiro256pp rng(777);
  for (int n = 2; n <= 6; ++n) {
    for (int trial = 0; trial < 20; ++trial) {
      // Log-uniform left endpoints stress narrow and wide intervals alike.
      const double a = std::exp(std::log(0.01) * rng.uniform());
      const double b = a + 1e-3 + rng.uniform() * (2.0 - a - 1e-3);
      const std::string where = "degree " + std::to_string(2 * n - 1) +
                                " on [" + fmt(a) + "," + fmt(b) + "]";
      const MinimaxResult r = remez(a, b, n);
      c.require(r.converged, where + ": not converged");
      c.require(r.alternance.size() == static_cast<std::size_t>(n) + 1,
                where + ": alternance size " +
                    std::to_string(r.alternance.size()));
      if (r.alternance.size() != static_cast<std::size_t>(n) + 1) continue;
      c.require(std::abs(r.alternance.front() - a) <= 1e-15 * a,
                where + ": alternance does not start at a");
      c.require(std::abs(r.alternance.back() - b) <= 1e-15 * b,
                where + ": alternance does not end at b");
      double prev = 0.0;
      for (std::size_t i = 0; i < r.alternance.size(); ++i) {
        const double dev = r.poly(r.alternance[i]) - 1.0;
        c.require(std::abs(std::abs(dev) - r.epsilon) <= 1e-9,
                  where + ": |deviation| at point " + std::to_string(i) +
                      " is " + fmt(std::abs(dev)) + ", eps " + fmt(r.epsilon));
        if (i > 0)
          c.require(dev * prev < 0.0,
                    where + ": signs do not alternate at point " +
                        std::to_string(i));
        prev = dev;
      }
      c.require(std::abs(r.poly(a) - (1.0 - r.epsilon)) <= 1e-9,
                where + ": p(a) != 1 - eps");
      c.require(r.poly.derivative_at_zero() >=
                    (1.0 - r.epsilon) / a * (1.0 - 1e-9),
                where + ": p'(0) = " + fmt(r.poly.derivative_at_zero()) +
                    " < (1-eps)/a = " + fmt((1.0 - r.epsilon) / a));
    }
  }
  return c;
}

// ---------------------------------------------------------------------------
// 6. Scale invariance of the error and coefficient rescaling identity.

Check criterion6() {
  Check c;
  const std::pair<double, double> ivs[] = {{0.3, 1.0}, {0.05, 1.5}};
  for (double t : {0.1, 10.0}) {
    for (auto [a, b] : ivs) {
      for (int n = 2; n <= 4; ++n) {
        const MinimaxResult base = remez(a, b, n);
        const MinimaxResult scaled = remez(t * a, t * b, n);
        const std::string where = "n=" + std::to_string(n) + " t=" + fmt(t) +
                                  " [" + fmt(a) + "," + fmt(b) + "]";
        c.require(std::abs(scaled.epsilon - base.epsilon) <=
                      1e-9 * base.epsilon,
                  where + ": eps " + fmt(scaled.epsilon) + " vs " +
                      fmt(base.epsilon));
        for (int k = 0; k < n; ++k) {
          const double want =
              base.poly.coeffs()[k] * std::pow(t, -(2 * k + 1));
          const double got = scaled.poly.coeffs()[k];
          c.require(std::abs(got - want) <= 1e-9 * std::abs(want),
                    where + ": coefficient " + std::to_string(k) + " " +
                        fmt(got) + " vs rescaled " + fmt(want));
        }
      }
    }
  }
  return c;
}

// ---------------------------------------------------------------------------
// 7. Residual-band compositions: generated chain properties and the shipped
//    coefficient lists.

int run_cli(const std::vector<std::string>& args, std::string* out = nullptr) {
  std::ostringstream o, e;
  const int code = cli::run(args, o, e);
  if (out) *out = o.str();
  return code;
}

Check criterion7() {
  Check c;
  const BackchainResult bc = backchained_schedule(2, 7, 0.3);
  c.require(bc.comp.derivative_at_zero() > 484.8,
            "phi'(0) = " + fmt(bc.comp.derivative_at_zero()) +
                " not above 484.8");
  c.require(bc.comp.matmul_cost() <= 14,
            "matmul cost " + std::to_string(bc.comp.matmul_cost()) + " > 14");
  // Containment of the generated composition over its certified domain.
  const std::size_t grid = 4000;
  for (std::size_t i = 0; i <= grid; ++i) {
    const double x =
        bc.a_star + (1.3 - bc.a_star) * static_cast<double>(i) / grid;
    const double y = bc.comp(x);
    c.require(y >= 0.7 - 1e-6 && y <= 1.3 + 1e-6,
              "generated composition leaves [0.7,1.3] at x=" + fmt(x) +
                  ": phi(x)=" + fmt(y));
  }

  // Shipped lists certify against their achieved deviation: labels carry
  // 3-significant-figure rounding, so 0.5% headroom on the label is the
  // tightest uniform claim (the worst measured overshoot is 0.21%).
  const std::string dir = std::string(TEST_DATA_DIR) + "/";
  const std::pair<const char*, double> lists[] = {
      {"cans_eps0.3_d3_iter7.json", 0.3},
      {"cans_eps0.3_d5_iter4.json", 0.3},
      {"cans_eps0.3_d5_iter5.json", 0.3},
      {"cans_eps0.00443_d3_iter9.json", 0.00443},
      {"cans_eps0.0035_d3_iter9.json", 0.0035},
      {"cans_eps0.00188_d3_iter9.json", 0.00188},
      {"jiacheng_d5_iter6.json", 0.0016}};
  for (const auto& [name, delta] : lists) {
    const int code =
        run_cli({"verify", "--composition", dir + name, "--delta",
                 fmt(delta * 1.005), "--bmax", "1"});
    c.require(code == 0, std::string(name) + " fails verification at delta " +
                             fmt(delta * 1.005));
  }

  // Slope comparison between the two deepest-reach lists.
  auto phi0 = [&](const std::string& name) {
    std::string out;
    run_cli({"verify", "--composition", dir + name, "--delta", "0.5",
             "--bmax", "1"},
            &out);
    const auto pos = out.find("phi_prime0=");
    return pos == std::string::npos
               ? 0.0
               : std::strtod(out.c_str() + pos + 11, nullptr);
  };
  const double ours = phi0("cans_eps0.00188_d3_iter9.json");
  const double theirs = phi0("jiacheng_d5_iter6.json");
  c.require(std::abs(ours - 1822.0) <= 1.0,
            "deep-reach list phi'(0) = " + fmt(ours) + ", want ~1822");
  c.require(std::abs(theirs - 1138.0) <= 1.0,
            "reference list phi'(0) = " + fmt(theirs) + ", want ~1138");
  c.require(ours > theirs, "slope comparison failed: " + fmt(ours) +
                               " <= " + fmt(theirs));
  return c;
}

// ---------------------------------------------------------------------------
// 8. Desk-scale orthogonalization benchmark.

struct BenchFooter {
  bool found = false;
  int converged = 0, diverged = 0, iterations = 0;
  long matmuls = 0;
};

BenchFooter parse_footer(const std::string& text, const std::string& method) {
  BenchFooter f;
  const std::string key = "# method=" + method + " converged=";
  const auto pos = text.find(key);
  if (pos == std::string::npos) return f;
  f.found = std::sscanf(text.c_str() + pos + key.size() - 10,
                        "converged=%d diverged=%d iterations=%d matmuls=%ld",
                        &f.converged, &f.diverged, &f.iterations,
                        &f.matmuls) == 4;
  return f;
}

Check criterion8() {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();

  // Exact-bounds regime: the interval chain vs classical iteration.
  std::string exact_out;
  c.require(run_cli({"bench", "--n", "300", "--seed", "42", "--methods",
                     "ns,cans3", "--normalization", "spectral", "--bounds",
                     "exact", "--target-eps", "1e-6"},
                    &exact_out) == 0,
            "exact-bounds bench failed");
  const BenchFooter ns_exact = parse_footer(exact_out, "ns");
  const BenchFooter chain = parse_footer(exact_out, "cans3");
  c.require(ns_exact.found && chain.found, "bench footers missing");
  c.require(ns_exact.converged == 1 && chain.converged == 1,
            "a method did not converge in the exact-bounds run");
  c.require(chain.iterations < ns_exact.iterations,
            "chain iterations " + std::to_string(chain.iterations) +
                " not below classical " + std::to_string(ns_exact.iterations));

  // Unknown-sigma-min regime: residual-band preprocessing vs Frobenius-
  // normalized classical iteration, compared on matmuls.
  std::string fro_out, pre_out;
  c.require(run_cli({"bench", "--n", "300", "--seed", "42", "--methods", "ns",
                     "--normalization", "fro", "--target-eps", "1e-6"},
                    &fro_out) == 0,
            "fro bench failed");
  c.require(run_cli({"bench", "--n", "300", "--seed", "42", "--methods",
                     "delta-preproc", "--normalization", "gelfand:2",
                     "--target-eps", "1e-6"},
                    &pre_out) == 0,
            "delta-preproc bench failed");
  const BenchFooter ns_fro = parse_footer(fro_out, "ns");
  const BenchFooter pre = parse_footer(pre_out, "delta-preproc");
  c.require(ns_fro.found && pre.found, "bench footers missing");
  c.require(ns_fro.converged == 1 && pre.converged == 1,
            "a method did not converge in the unknown-bounds run");
  c.require(pre.matmuls < ns_fro.matmuls,
            "preprocessing matmuls " + std::to_string(pre.matmuls) +
                " not below classical " + std::to_string(ns_fro.matmuls));

  const double dt = elapsed_s(t0);
  c.require(dt < 60.0, "benchmark took " + fmt(dt) + " s (budget 60 s)");
  return c;
}

// ---------------------------------------------------------------------------
// 9. Gelfand upper-bound sandwich on random rectangular matrices.

Check criterion9() {
  Check c;
  Xoshiro256pp rng(4242);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t rows = 2 + static_cast<std::size_t>(rng.uniform() * 127);
    const std::size_t cols =
        1 + static_cast<std::size_t>(rng.uniform() *
                                     static_cast<double>(
                                         std::min<std::size_t>(rows, 64)));
    const DenseMatrix a =
        gaussian_matrix(rows, cols, 9000 + static_cast<std::uint64_t>(trial));
    const double sigma1 = reference_svd(a).s.front();
    for (int k : {1, 2, 3}) {
      const double est = gelfand_estimate(a, k);
      const double cap =
          std::pow(static_cast<double>(cols), 1.0 / (4.0 * k)) * sigma1;
      const std::string where = "trial " + std::to_string(trial) + " (" +
                                std::to_string(rows) + "x" +
                                std::to_string(cols) + "), k=" +
                                std::to_string(k);
      c.require(sigma1 <= est * (1.0 + 1e-9),
                where + ": estimate " + fmt(est) + " below sigma1 " +
                    fmt(sigma1));
      c.require(est <= cap * (1.0 + 1e-9),
                where + ": estimate " + fmt(est) + " above cap " + fmt(cap));
    }
  }
  return c;
}

// ---------------------------------------------------------------------------
// 10. Stiefel property suite and the trace-maximization toy problem.

double tangency_resid(const DenseMatrix& x, const DenseMatrix& z) {
  DenseMatrix ztx = multiply(transpose(z), x);
  return frobenius_norm(add_scaled(1.0, ztx, 1.0, transpose(ztx)));
}

double diff_norm(const DenseMatrix& a, const DenseMatrix& b) {
  return frobenius_norm(add_scaled(1.0, a, -1.0, b));
}

Check criterion10() {
  Check c;
  Xoshiro256pp rng(1001);

  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 4 + static_cast<std::size_t>(rng.uniform() * 17);
    const std::size_t p =
        1 + static_cast<std::size_t>(
                rng.uniform() * static_cast<double>(std::min<std::size_t>(
                                    n - 1, 6)));
    const std::uint64_t seed = 5000 + 2 * static_cast<std::uint64_t>(trial);
    const StiefelPoint x(test_support::gram_schmidt(
        gaussian_matrix(n, p, seed)));
    const DenseMatrix z = gaussian_matrix(n, p, seed + 1);
    const double zn = frobenius_norm(z);
    const std::string where = "trial " + std::to_string(trial) + " (" +
                              std::to_string(n) + "x" + std::to_string(p) +
                              ")";

    const TangentVector t = project_tangent(x, z);
    c.require(tangency_resid(x.x, t.z) <= 1e-10 * zn,
              where + ": projection not tangent");
    c.require(diff_norm(project_tangent(x, t.z).z, t.z) <= 1e-10 * zn,
              where + ": projection not idempotent");
    c.require(diff_norm(multiply(w_matrix(x, z), x.x), t.z) <= 1e-10 * zn,
              where + ": W X disagrees with the projection");

    const DenseMatrix a = add_scaled(1.0, x.x, 1.0, t.z);
    const SvdResult svd = reference_svd(a);
    c.require(svd.s.back() >= 1.0 - 1e-9,
              where + ": sigma_p = " + fmt(svd.s.back()) + " below 1");
    c.require(svd.s.front() <= sigma1_bound(a, p) * (1.0 + 1e-12),
              where + ": sigma_1 above its bound");

    if (trial == 0) {
      const StiefelPoint r0 = polar_retract(x, TangentVector{DenseMatrix(n, p)});
      bool same = true;
      for (std::size_t i = 0; i < n * p; ++i)
        same = same && r0.x.data()[i] == x.x.data()[i];
      c.require(same, "Retr_X(0) differs from X");
    }
  }

  // First-order rigidity by finite differences.
  {
    const StiefelPoint x(
        test_support::gram_schmidt(gaussian_matrix(14, 5, 7100)));
    TangentVector v = project_tangent(x, gaussian_matrix(14, 5, 7101));
    v.z = scale(v.z, 1.0 / frobenius_norm(v.z));
    auto err = [&](double t) {
      const TangentVector tv{scale(v.z, t)};
      return diff_norm(polar_retract(x, tv, 2).x,
                       add_scaled(1.0, x.x, 1.0, tv.z));
    };
    const double e2 = err(1e-2), e3 = err(1e-3);
    c.require(e2 <= 1e-3 && e3 <= 1e-5,
              "retraction error not second order: err(1e-2)=" + fmt(e2) +
                  " err(1e-3)=" + fmt(e3));
    c.require(e2 / e3 >= 80.0 && e2 / e3 <= 125.0,
              "retraction error ratio " + fmt(e2 / e3) + " not ~100");
  }

  // Trace maximization on St(20, 4) against the eigensolve oracle.
  const std::size_t n = 20, p = 4;
  DenseMatrix m = gaussian_matrix(n, n, 7200);
  m = scale(m, 1.0 / std::sqrt(static_cast<double>(n)));
  const DenseMatrix bmat = gram(m);
  const SvdResult msvd = reference_svd(m);
  double opt = 0.0;
  for (std::size_t i = 0; i < p; ++i) opt += msvd.s[i] * msvd.s[i];
  auto objective = [&](const DenseMatrix& x) {
    const DenseMatrix bx = multiply(bmat, x);
    double tr = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < p; ++j) tr += x(i, j) * bx(i, j);
    return tr;
  };
  auto gradient = [&](const DenseMatrix& x) {
    return scale(multiply(bmat, x), -2.0);
  };

  {
    OptimizerOptions opts;
    opts.lr = 0.05;
    OptimizerState s(
        StiefelPoint(test_support::gram_schmidt(gaussian_matrix(n, p, 7201))),
        opts);
    for (int k = 0; k < 500; ++k) {
      s = rsgd_step(std::move(s), gradient(s.x.x));
      c.require(identity_residual(gram(s.x.x)) <= 1e-6,
                "rsgd drift above 1e-6 at step " + std::to_string(k));
    }
    const double got = objective(s.x.x);
    c.require(got >= opt * (1.0 - 1e-3),
              "rsgd reached " + fmt(got) + ", oracle optimum " + fmt(opt));
    c.require(got <= opt * (1.0 + 1e-9),
              "rsgd objective " + fmt(got) + " above the oracle optimum " +
                  fmt(opt));
  }
  {
    OptimizerOptions opts;
    opts.lr = 0.05;
    OptimizerState s(
        StiefelPoint(test_support::gram_schmidt(gaussian_matrix(n, p, 7202))),
        opts);
    for (int k = 0; k < 1400; ++k) {
      s = radam_step(std::move(s), gradient(s.x.x));
      if (k >= 800) s.opts.lr *= 0.99;  // settle after reaching the basin
      c.require(identity_residual(gram(s.x.x)) <= 1e-6,
                "radam drift above 1e-6 at step " + std::to_string(k));
    }
    const double got = objective(s.x.x);
    c.require(got >= opt * (1.0 - 1e-3),
              "radam reached " + fmt(got) + ", oracle optimum " + fmt(opt));
    c.require(got <= opt * (1.0 + 1e-9),
              "radam objective " + fmt(got) + " above the oracle optimum " +
                  fmt(opt));
  }
  return c;
}

}  // namespace

int main() {
  struct Entry {
    int id;
    const char* summary;
    Check (*fn)();
  };
  const Entry entries[] = {
      {1, "closed-form cubic matches the exchange solver on random intervals",
       criterion1},
      {2, "degenerate-interval limit recovers (1.5, -0.5)", criterion2},
      {3, "error recursion is quadratic with asymptotic ratio 3/4",
       criterion3},
      {4, "degree-3 chains meet the predicted iteration count", criterion4},
      {5, "equioscillation certificates hold for degrees 3-11", criterion5},
      {6, "scale invariance of errors and coefficients", criterion6},
      {7, "residual-band compositions: generated chain and shipped lists",
       criterion7},
      {8, "desk-scale orthogonalization benchmark", criterion8},
      {9, "Gelfand estimate sandwich on random matrices", criterion9},
      {10, "Stiefel property suite and optimizer toy problem", criterion10},
  };

  int failures = 0;
  for (const Entry& e : entries) {
    Check c;
    try {
      c = e.fn();
    } catch (const std::exception& ex) {
      c.ok = false;
      c.why = std::string("exception: ") + ex.what();
    }
    if (c.ok) {
      std::printf("PASS criterion %d: %s\n", e.id, e.summary);
    } else {
      std::printf("FAIL criterion %d: %s -- %s\n", e.id, e.summary,
                  c.why.c_str());
      ++failures;
    }
    std::fflush(stdout);
  }
  return failures;
}
