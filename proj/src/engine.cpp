#include "cans/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "cans/errors.hpp"
#include "cans/svd.hpp"

namespace cans {

std::string ConvergenceTrace::to_csv() const {
  std::string out = "iter,matmuls,fro_err,spec_err\n";
  char buf[128];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof(buf), "%d,%ld,%.17g,", r.iter, r.matmuls,
                  r.fro_err);
    out += buf;
    if (r.spec_err) {
      std::snprintf(buf, sizeof(buf), "%.17g", *r.spec_err);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

DenseMatrix apply_odd_poly_with_gram(const DenseMatrix& x,
                                     const OddPolynomial& p,
                                     const DenseMatrix& g, int threads) {
  if (g.rows() != x.cols() || g.cols() != x.cols())
    throw std::invalid_argument("apply_odd_poly: Gram matrix shape mismatch");
  const auto& c = p.coeffs();
  // Horner against the iterate: R = c_{d-1} X; R = R*G + c_k X.
  DenseMatrix r = scale(x, c.back());
  for (std::size_t k = c.size() - 1; k-- > 0;)
    r = add_scaled(c[k], x, 1.0, multiply(r, g, threads));
  if (!all_finite(r))
    throw NumericError("apply_odd_poly: non-finite result (overflow)");
  return r;
}

DenseMatrix apply_odd_poly(const DenseMatrix& x, const OddPolynomial& p,
                           int threads) {
  if (x.rows() < x.cols())
    throw std::invalid_argument("apply_odd_poly: need rows >= cols");
  return apply_odd_poly_with_gram(x, p, gram(x, threads), threads);
}

namespace {

double spec_err_from_svd(const DenseMatrix& x) {
  SvdResult svd = reference_svd(x);
  double worst = 0.0;
  for (double s : svd.s) worst = std::max(worst, std::abs(s - 1.0));
  return worst;
}

}  // namespace

std::pair<DenseMatrix, ConvergenceTrace> classical_newton_schulz(
    const DenseMatrix& x0, int iters, bool oracle, int threads) {
  if (x0.rows() < x0.cols())
    throw std::invalid_argument("classical_newton_schulz: need rows >= cols");
  if (iters < 0)
    throw std::invalid_argument("classical_newton_schulz: iters >= 0");
  const OddPolynomial ns = OddPolynomial::newton_schulz();
  DenseMatrix x = x0;
  ConvergenceTrace trace;
  long matmuls = 0;
  for (int it = 0; it <= iters; ++it) {
    DenseMatrix g = gram(x, threads);
    const double fro = identity_residual(g);
    TraceRecord rec{it, matmuls, fro, std::nullopt};
    if (oracle) rec.spec_err = spec_err_from_svd(x);
    trace.records.push_back(rec);
    if (fro > 1e6) {
      trace.diverged = true;
      break;
    }
    if (it == iters) break;
    x = apply_odd_poly_with_gram(x, ns, g, threads);
    matmuls += 2;  // the Gram above + one Horner multiply
  }
  return {std::move(x), std::move(trace)};
}

double gelfand_estimate(const DenseMatrix& a, int k, int threads) {
  if (k < 1) throw std::invalid_argument("gelfand_estimate: need k >= 1");
  const double fro = frobenius_norm(a);
  if (fro == 0.0) return 0.0;
  // Pre-scale so the Gram powers cannot overflow: sigma_1(a/fro) <= 1.
  DenseMatrix b = scale(a, 1.0 / fro);
  DenseMatrix g = gram(b, threads);
  DenseMatrix p = g;
  for (int i = 1; i < k; ++i) p = multiply(p, g, threads);
  return std::pow(frobenius_norm(p), 1.0 / (2.0 * k)) * fro;
}

std::pair<DenseMatrix, double> normalize(const DenseMatrix& a,
                                         Normalization method, int threads) {
  const double fro = frobenius_norm(a);
  if (fro == 0.0) throw std::invalid_argument("normalize: zero matrix");
  if (!all_finite(a)) throw std::invalid_argument("normalize: non-finite input");
  double scale_by = 0.0;
  switch (method.kind) {
    case NormKind::frobenius:
      scale_by = fro;
      break;
    case NormKind::gelfand:
      scale_by = gelfand_estimate(a, method.k, threads);
      break;
    case NormKind::spectral_exact: {
      const bool wide = a.rows() < a.cols();
      SvdResult svd = reference_svd(wide ? transpose(a) : a);
      scale_by = svd.s.front();
      break;
    }
  }
  if (!(scale_by > 0.0))
    throw NumericError("normalize: spectral bound is not positive");
  return {scale(a, 1.0 / scale_by), scale_by};
}

OrthoError orthogonality_error(const DenseMatrix& x, bool use_oracle) {
  OrthoError err;
  err.fro = identity_residual(gram(x));
  if (use_oracle) {
    if (x.cols() > kSvdSizeCap)
      throw NumericError("orthogonality_error: oracle SVD cap 512 exceeded");
    err.spec = spec_err_from_svd(x);
  }
  return err;
}

std::pair<DenseMatrix, ConvergenceTrace> orthogonalize(
    const DenseMatrix& a, const OrthogonalizeConfig& config) {
  if (a.rows() < a.cols())
    throw std::invalid_argument("orthogonalize: need rows >= cols");
  if (!(config.target_eps > 0.0))
    throw std::invalid_argument("orthogonalize: target_eps must be positive");
  if (!config.a_hint && !config.schedule && !config.delta_preprocess)
    throw std::invalid_argument(
        "orthogonalize: no interval information (need a_hint, schedule, or "
        "delta preprocessing)");

  const int threads = config.threads;
  const double fro = frobenius_norm(a);
  if (fro == 0.0) throw std::invalid_argument("orthogonalize: zero matrix");

  long matmuls = 0;
  double scale_by = 0.0;
  std::optional<DenseMatrix> reuse_gram;  // Gram of normalized x, if free
  if (config.normalization.kind == NormKind::gelfand) {
    // Inline Gelfand estimate so its first Gram power is reused by the first
    // polynomial stage (the estimate then adds k multiplies net).
    const int k = config.normalization.k;
    DenseMatrix b = scale(a, 1.0 / fro);
    DenseMatrix g1 = gram(b, threads);
    DenseMatrix p = g1;
    for (int i = 1; i < k; ++i) p = multiply(p, g1, threads);
    scale_by = std::pow(frobenius_norm(p), 1.0 / (2.0 * k)) * fro;
    matmuls += k;
    if (!(scale_by > 0.0))
      throw NumericError("orthogonalize: spectral bound is not positive");
    const double ratio = fro / scale_by;
    reuse_gram = scale(g1, ratio * ratio);
  } else if (config.normalization.kind == NormKind::frobenius) {
    scale_by = fro;
  } else {
    const bool wide = a.rows() < a.cols();
    SvdResult svd = reference_svd(wide ? transpose(a) : a);
    scale_by = svd.s.front();
    if (!(scale_by > 0.0))
      throw NumericError("orthogonalize: spectral bound is not positive");
  }
  DenseMatrix x = scale(a, 1.0 / scale_by);

  ConvergenceTrace trace;
  int iter = 0;
  bool diverged = false;
  auto record = [&](const DenseMatrix& m) {
    OrthoError e =
        orthogonality_error(m, config.oracle && m.cols() <= kSvdSizeCap);
    trace.records.push_back(TraceRecord{iter, matmuls, e.fro, e.spec});
    if (e.fro > 1e6) {
      trace.diverged = true;
      diverged = true;
    }
  };
  record(x);

  auto apply_stage = [&](const OddPolynomial& p) {
    if (reuse_gram) {
      x = apply_odd_poly_with_gram(x, p, *reuse_gram, threads);
      matmuls += p.matmul_cost() - 1;
      reuse_gram.reset();
    } else {
      x = apply_odd_poly(x, p, threads);
      matmuls += p.matmul_cost();
    }
    ++iter;
    record(x);
  };

  double lo = 0.0, hi = 1.0;
  bool have_interval = false;
  if (config.delta_preprocess) {
    const DeltaDesign& design = *config.delta_preprocess;
    for (const auto& e : design.schedule.entries) {
      if (diverged) break;
      apply_stage(e.poly);
    }
    lo = 1.0 - design.delta;
    hi = 1.0 + design.delta;
    have_interval = true;
  } else if (config.a_hint) {
    if (!(*config.a_hint > 0.0 && *config.a_hint <= 1.0))
      throw std::invalid_argument("orthogonalize: a_hint must be in (0, 1]");
    lo = *config.a_hint;
    hi = 1.0;
    have_interval = true;
  }

  if (config.schedule) {
    for (const auto& e : config.schedule->entries) {
      if (diverged) break;
      apply_stage(e.poly);
    }
    const Interval fin = config.schedule->final_interval();
    lo = fin.lo;
    hi = fin.hi;
    have_interval = true;
  }

  // Extend with closed-form degree-3 stages until the certified error meets
  // the target (never triggers an exchange solve, only the cubic formula).
  if (have_interval && !diverged) {
    double eps_cert = std::max(1.0 - lo, hi - 1.0);
    int guard = 0;
    while (eps_cert > config.target_eps && ++guard <= 200 && !diverged) {
      MinimaxResult stage = best_cubic(lo, hi);
      apply_stage(stage.poly);
      if (stage.epsilon > 0.0 && stage.epsilon < eps_cert) {
        eps_cert = stage.epsilon;
      } else {
        // Closed form hit its floating-point floor; quadratic limit instead.
        eps_cert = 0.75 * eps_cert * eps_cert;
      }
      lo = 1.0 - eps_cert;
      hi = 1.0 + eps_cert;
    }
    if (guard > 200)
      throw NumericError("orthogonalize: failed to reach target_eps");
  }
  return {std::move(x), std::move(trace)};
}

}  // namespace cans
