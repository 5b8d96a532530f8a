#pragma once

#include <cstddef>

#include "cans/matrix.hpp"

namespace cans {

// Point on the Stiefel manifold St(n, p): X is n x p with X^T X = I_p,
// maintained within 1e-6 in Frobenius norm by the retraction.
struct StiefelPoint {
  DenseMatrix x;

  explicit StiefelPoint(DenseMatrix x_in, double tol = 1e-6);

  std::size_t n() const { return x.rows(); }
  std::size_t p() const { return x.cols(); }
};

// Tangent vector at `base`: base^T z + z^T base = 0.
struct TangentVector {
  DenseMatrix z;
};

// Projection onto the tangent space at X:
//   pi_X(Z) = Z - 0.5 * X (Z^T X + X^T Z).
TangentVector project_tangent(const StiefelPoint& x, const DenseMatrix& z);

// Skew-symmetric W with W*X = pi_X(Z):
//   What = Z X^T - 0.5 X (X^T Z X^T),  W = What - What^T.
DenseMatrix w_matrix(const StiefelPoint& x, const DenseMatrix& z);

// sqrt(||A||_F^2 - (p-1)): upper bound on sigma_1(A) valid whenever at least
// p-1 singular values of A are >= 1 (in particular for A = X + tangent).
// Throws std::invalid_argument when the radicand is negative.
double sigma1_bound(const DenseMatrix& a, std::size_t p);

// Polar retraction: A = X + V, normalize by the sigma1 bound, then apply s
// rounds of the interval-optimal cubic starting from [1/sigma1_bound, 1].
// V = 0 returns X unchanged (bitwise).
StiefelPoint polar_retract(const StiefelPoint& x, const TangentVector& v,
                           int s = 1, int threads = 1);

struct OptimizerOptions {
  double lr = 0.1;
  double beta = 0.9;    // SGD momentum
  double beta1 = 0.9;   // Adam
  double beta2 = 0.999;
  double eps = 1e-8;
  int retract_rounds = 1;
  int threads = 1;
};

struct OptimizerState {
  StiefelPoint x;
  DenseMatrix momentum;  // n x p, zero-initialized
  double v = 0.0;        // Adam second-moment scalar
  long step_count = 0;
  OptimizerOptions opts;
  // Extra classical Newton-Schulz passes applied by drift control; every
  // application is counted here (never silent).
  long drift_corrections = 0;

  explicit OptimizerState(StiefelPoint x0, OptimizerOptions o = {});
};

// Momentum Riemannian SGD step:
//   M <- beta*M - G;  M <- pi_X(M);  X <- Retr_X(alpha*M).
OptimizerState rsgd_step(OptimizerState s, const DenseMatrix& grad);

// Riemannian Adam step with scalar second moment:
//   v <- beta2*v + (1-beta2)*||G||_F^2;  vhat = v / (1 - beta2^k)
//   M <- beta1*M - (1-beta1)*G;          Mhat = M / (1 - beta1^k)
//   Mhat <- pi_X(Mhat);  X <- Retr_X(alpha*Mhat / sqrt(vhat + eps));
//   M <- (1 - beta1^k) * Mhat.
OptimizerState radam_step(OptimizerState s, const DenseMatrix& grad);

}  // namespace cans
