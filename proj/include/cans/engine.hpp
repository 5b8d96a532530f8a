#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cans/matrix.hpp"
#include "cans/poly.hpp"
#include "cans/schedule.hpp"

namespace cans {

enum class NormKind { frobenius, gelfand, spectral_exact };

struct Normalization {
  NormKind kind = NormKind::frobenius;
  int k = 2;  // Gram powers for the Gelfand estimate

  static Normalization fro() { return {NormKind::frobenius, 0}; }
  static Normalization gelfand_k(int k) { return {NormKind::gelfand, k}; }
  static Normalization spectral() { return {NormKind::spectral_exact, 0}; }
};

// One trace row per iteration/stage.  `matmuls` counts the multiplies spent
// producing the iterate (normalization estimates and polynomial stages);
// error measurement is instrumentation and is not charged.
struct TraceRecord {
  int iter = 0;
  long matmuls = 0;
  double fro_err = 0.0;                   // ||X^T X - I||_F
  std::optional<double> spec_err;         // max_i |sigma_i - 1|, oracle-based
};

struct ConvergenceTrace {
  std::vector<TraceRecord> records;
  bool diverged = false;

  // CSV with header "iter,matmuls,fro_err,spec_err"; spec_err column left
  // empty when no oracle value was recorded.
  std::string to_csv() const;
};

// X * p(X) in the Gram sense: G = X^T X once, then Horner in G with multiplies
// against the running m x n iterate; an n-term polynomial costs exactly
// `p.matmul_cost()` = d multiplies.  Throws NumericError on non-finite output.
DenseMatrix apply_odd_poly(const DenseMatrix& x, const OddPolynomial& p,
                           int threads = 1);

// Same, but reuses a precomputed Gram matrix of x (saves one multiply; used
// when normalization already computed X^T X).
DenseMatrix apply_odd_poly_with_gram(const DenseMatrix& x,
                                     const OddPolynomial& p,
                                     const DenseMatrix& g, int threads = 1);

// Classical Newton-Schulz iteration X <- 1.5 X - 0.5 X X^T X.  Converges to
// the polar factor iff sigma_1 < sqrt(3) and sigma_min > 0.  Sets the trace's
// diverged flag (and stops) once fro_err exceeds 1e6.
std::pair<DenseMatrix, ConvergenceTrace> classical_newton_schulz(
    const DenseMatrix& x, int iters, bool oracle = false, int threads = 1);

// || (A^T A)^k ||_F^{1/(2k)}: upper bound on sigma_1 with sandwich
// sigma_1 <= estimate <= n^{1/(4k)} sigma_1.  Input is pre-scaled by its
// Frobenius norm so the Gram powers cannot overflow.
double gelfand_estimate(const DenseMatrix& a, int k, int threads = 1);

// Divides by the selected spectral upper bound; returns (X, scale).
// Zero matrices are rejected.
std::pair<DenseMatrix, double> normalize(const DenseMatrix& a,
                                         Normalization method,
                                         int threads = 1);

struct OrthogonalizeConfig {
  Normalization normalization = Normalization::fro();
  // Left boundary of the known singular-value interval AFTER normalization.
  std::optional<double> a_hint;
  // Precomputed schedule to apply (applying it never triggers a minimax
  // solve).  When absent, a degree-3 chain is built from the known interval.
  std::optional<Schedule> schedule;
  // Optional delta-orthogonalization preprocessing; establishes the interval
  // [1-delta, 1+delta] regardless of a_hint.
  std::optional<DeltaDesign> delta_preprocess;
  double target_eps = 1e-6;
  bool oracle = false;  // record spec_err in the trace (cols <= 512)
  int threads = 1;
};

// Normalize, optionally run the delta-orthogonalization composition, then
// apply/extend the schedule until its final eps <= target_eps.  Throws
// std::invalid_argument when no interval information is available (no a_hint,
// no schedule, no preprocessing).
std::pair<DenseMatrix, ConvergenceTrace> orthogonalize(
    const DenseMatrix& a, const OrthogonalizeConfig& config);

struct OrthoError {
  double fro = 0.0;
  std::optional<double> spec;
};

// fro = ||X^T X - I||_F always; spec = max_i |sigma_i(X) - 1| through the
// oracle SVD when requested (requires cols <= 512).
OrthoError orthogonality_error(const DenseMatrix& x, bool use_oracle = false);

}  // namespace cans
