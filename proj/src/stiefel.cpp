#include "cans/stiefel.hpp"

#include <cmath>
#include <stdexcept>

#include "cans/engine.hpp"
#include "cans/errors.hpp"
#include "cans/minimax.hpp"

namespace cans {

StiefelPoint::StiefelPoint(DenseMatrix x_in, double tol) : x(std::move(x_in)) {
  if (x.rows() < x.cols())
    throw std::invalid_argument("StiefelPoint: need n >= p");
  const double resid = identity_residual(gram(x));
  if (!(resid <= tol))
    throw std::invalid_argument("StiefelPoint: X^T X - I residual too large");
}

TangentVector project_tangent(const StiefelPoint& x, const DenseMatrix& z) {
  if (!x.x.same_shape(z))
    throw std::invalid_argument("project_tangent: shape mismatch");
  // pi_X(Z) = Z - 0.5 X (Z^T X + X^T Z)
  DenseMatrix ztx = multiply(transpose(z), x.x);
  DenseMatrix sym = add_scaled(1.0, ztx, 1.0, transpose(ztx));
  return TangentVector{add_scaled(1.0, z, -0.5, multiply(x.x, sym))};
}

DenseMatrix w_matrix(const StiefelPoint& x, const DenseMatrix& z) {
  if (!x.x.same_shape(z))
    throw std::invalid_argument("w_matrix: shape mismatch");
  // What = Z X^T - 0.5 X (X^T Z X^T); W = What - What^T
  DenseMatrix xt = transpose(x.x);
  DenseMatrix zxt = multiply(z, xt);
  DenseMatrix xtzxt = multiply(xt, zxt);
  DenseMatrix what = add_scaled(1.0, zxt, -0.5, multiply(x.x, xtzxt));
  return add_scaled(1.0, what, -1.0, transpose(what));
}

double sigma1_bound(const DenseMatrix& a, std::size_t p) {
  if (p == 0 || p > a.cols())
    throw std::invalid_argument("sigma1_bound: bad p");
  const double f2 = frobenius_norm(a);
  const double radicand = f2 * f2 - static_cast<double>(p - 1);
  if (radicand < 0.0)
    throw std::invalid_argument(
        "sigma1_bound: negative radicand (input is not X + tangent)");
  return std::sqrt(radicand);
}

StiefelPoint polar_retract(const StiefelPoint& x, const TangentVector& v,
                           int s, int threads) {
  if (!x.x.same_shape(v.z))
    throw std::invalid_argument("polar_retract: shape mismatch");
  if (s < 1) throw std::invalid_argument("polar_retract: need s >= 1");
  if (frobenius_norm(v.z) == 0.0) return x;  // retraction axiom, bitwise

  DenseMatrix a = add_scaled(1.0, x.x, 1.0, v.z);
  // In exact arithmetic the bound is >= 1 for X + tangent; drift in X can
  // push it a hair under, degenerating the interval. Clamp to the a = b
  // limit cubic in that regime.
  double bound = sigma1_bound(a, a.cols());
  if (bound < 1.0 + 1e-12) bound = 1.0;
  DenseMatrix r = scale(a, 1.0 / bound);

  double lo = 1.0 / bound, hi = 1.0;
  for (int round = 0; round < s; ++round) {
    MinimaxResult stage = best_cubic(lo, hi);  // a == b -> limit cubic
    r = apply_odd_poly(r, stage.poly, threads);
    lo = 1.0 - stage.epsilon;
    hi = 1.0 + stage.epsilon;
  }

  // Re-tighten: the manifold invariant is 1e-6, enforced with extra classical
  // Newton-Schulz passes when the s optimal rounds were not enough.
  const OddPolynomial ns = OddPolynomial::newton_schulz();
  for (int guard = 0; guard < 32; ++guard) {
    if (identity_residual(gram(r)) <= 1e-6) break;
    r = apply_odd_poly(r, ns, threads);
  }
  return StiefelPoint(std::move(r));
}

namespace {

// Retraction with the drift-control passes counted (never silent).
StiefelPoint retract_logged(const StiefelPoint& x, const DenseMatrix& step,
                            int rounds, int threads, long& corrections) {
  if (frobenius_norm(step) == 0.0) return x;
  DenseMatrix a = add_scaled(1.0, x.x, 1.0, step);
  double bound = sigma1_bound(a, a.cols());
  if (bound < 1.0 + 1e-12) bound = 1.0;  // degenerate interval: limit cubic
  DenseMatrix r = scale(a, 1.0 / bound);
  double lo = 1.0 / bound, hi = 1.0;
  for (int round = 0; round < rounds; ++round) {
    MinimaxResult stage = best_cubic(lo, hi);
    r = apply_odd_poly(r, stage.poly, threads);
    lo = 1.0 - stage.epsilon;
    hi = 1.0 + stage.epsilon;
  }
  const OddPolynomial ns = OddPolynomial::newton_schulz();
  for (int guard = 0; guard < 32; ++guard) {
    if (identity_residual(gram(r)) <= 1e-6) break;
    r = apply_odd_poly(r, ns, threads);
    ++corrections;
  }
  return StiefelPoint(std::move(r));
}

}  // namespace

OptimizerState::OptimizerState(StiefelPoint x0, OptimizerOptions o)
    : x(std::move(x0)),
      momentum(x.n(), x.p()),
      v(0.0),
      step_count(0),
      opts(o),
      drift_corrections(0) {}

OptimizerState rsgd_step(OptimizerState s, const DenseMatrix& grad) {
  if (!s.x.x.same_shape(grad))
    throw std::invalid_argument("rsgd_step: gradient shape mismatch");
  DenseMatrix m = add_scaled(s.opts.beta, s.momentum, -1.0, grad);
  m = project_tangent(s.x, m).z;
  DenseMatrix step = scale(m, s.opts.lr);
  s.x = retract_logged(s.x, step, s.opts.retract_rounds, s.opts.threads,
                       s.drift_corrections);
  s.momentum = std::move(m);
  ++s.step_count;
  return s;
}

OptimizerState radam_step(OptimizerState s, const DenseMatrix& grad) {
  if (!s.x.x.same_shape(grad))
    throw std::invalid_argument("radam_step: gradient shape mismatch");
  const long k = s.step_count + 1;
  const double b1 = s.opts.beta1, b2 = s.opts.beta2;
  const double gnorm = frobenius_norm(grad);

  s.v = b2 * s.v + (1.0 - b2) * gnorm * gnorm;
  const double bias2 = 1.0 - std::pow(b2, static_cast<double>(k));
  const double vhat = s.v / bias2;

  DenseMatrix m = add_scaled(b1, s.momentum, -(1.0 - b1), grad);
  const double bias1 = 1.0 - std::pow(b1, static_cast<double>(k));
  DenseMatrix mhat = scale(m, 1.0 / bias1);
  mhat = project_tangent(s.x, mhat).z;

  // M accumulates -G, so the descent step moves along +Mhat.
  DenseMatrix step = scale(mhat, s.opts.lr / std::sqrt(vhat + s.opts.eps));
  s.x = retract_logged(s.x, step, s.opts.retract_rounds, s.opts.threads,
                       s.drift_corrections);
  s.momentum = scale(mhat, bias1);  // transported momentum
  s.step_count = k;
  return s;
}

}  // namespace cans
