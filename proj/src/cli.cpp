#include "cans/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cans/engine.hpp"
#include "cans/errors.hpp"
#include "cans/jsonio.hpp"
#include "cans/matrix.hpp"
#include "cans/minimax.hpp"
#include "cans/poly.hpp"
#include "cans/rng.hpp"
#include "cans/schedule.hpp"
#include "cans/stiefel.hpp"
#include "cans/svd.hpp"

namespace cans::cli {
namespace {

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

int terms_for_degree(int degree) {
  if (degree < 1 || degree % 2 == 0)
    throw ParseError("degree must be odd and >= 1");
  return (degree + 1) / 2;
}

Normalization parse_normalization(const std::string& s) {
  if (s == "fro") return Normalization::fro();
  if (s == "spectral") return Normalization::spectral();
  if (s.rfind("gelfand", 0) == 0) {
    int k = 2;
    if (s.size() > 7) {
      if (s[7] != ':') throw ParseError("bad normalization: " + s);
      try {
        k = std::stoi(s.substr(8));
      } catch (const std::exception&) {
        throw ParseError("bad normalization: " + s);
      }
    }
    if (k < 1) throw ParseError("gelfand power must be >= 1");
    return Normalization::gelfand_k(k);
  }
  throw ParseError("unknown normalization \"" + s +
                   "\" (use fro | gelfand:k | spectral)");
}

struct BoundsSpec {
  bool exact = true;
  double a0 = 0.0;  // assumed left boundary after normalization
};

BoundsSpec parse_bounds(const std::string& s) {
  if (s == "exact") return {true, 0.0};
  for (const char* prefix : {"overestimate:", "underestimate:", "hint:"}) {
    const std::string p(prefix);
    if (s.rfind(p, 0) == 0) {
      double a0 = 0.0;
      try {
        a0 = std::stod(s.substr(p.size()));
      } catch (const std::exception&) {
        throw ParseError("bad bounds: " + s);
      }
      if (!(a0 > 0.0) || !(a0 <= 1.0))
        throw ParseError("bounds value must be in (0, 1]");
      return {false, a0};
    }
  }
  throw ParseError("unknown bounds \"" + s +
                   "\" (use exact | overestimate:a0 | underestimate:a0)");
}

void emit_text(const std::string& path, const std::string& text,
               std::ostream& fallback) {
  if (path.empty()) {
    fallback << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw ParseError("cannot open " + path + " for writing");
  f << text;
}

void emit_json(const nlohmann::json& j, const std::string& path,
               std::ostream& fallback) {
  emit_text(path, j.dump(2) + "\n", fallback);
}

// ---------------------------------------------------------------------------
// remez

struct RemezOpts {
  double a = 0.0, b = 0.0;
  int degree = 3;
  double tol = 1e-12;
  int max_iter = 100;
  std::string out;
};

int cmd_remez(const RemezOpts& o, std::ostream& out) {
  const int n = terms_for_degree(o.degree);
  // a == b degenerates to the limit polynomial (closed forms only).
  MinimaxResult r = (o.a == o.b) ? minimax_solve(n, o.a, o.b)
                                 : remez(o.a, o.b, n, o.tol, o.max_iter);
  nlohmann::json j = minimax_to_json(r);
  j["converged"] = r.converged;
  j["iterations"] = r.iterations;
  emit_json(j, o.out, out);
  return r.converged ? kExitOk : kExitNumeric;
}

// ---------------------------------------------------------------------------
// schedule

struct ScheduleOpts {
  std::string mode = "exact";
  double a = 0.0, b = 0.0;
  std::vector<int> degrees;
  double delta = 0.3;
  double bmax = -1.0;
  double eps_tol = 1e-7;
  int degree = 3;  // maxderiv / backchain
  int iters = 1;   // backchain length
  std::string out;
};

int cmd_schedule(const ScheduleOpts& o, std::ostream& out) {
  if (o.mode == "exact") {
    if (o.degrees.empty())
      throw ParseError("schedule --mode exact requires --degrees");
    Schedule s = cans_schedule(o.a, o.b, o.degrees);
    emit_json(schedule_to_json(s), o.out, out);
    return kExitOk;
  }
  if (o.mode == "delta") {
    if (o.degrees.empty())
      throw ParseError("schedule --mode delta requires --degrees");
    DeltaDesign d = delta_design(o.delta, o.degrees, o.bmax, o.eps_tol);
    nlohmann::json j = schedule_to_json(d.schedule, d.delta);
    j["a_reach"] = d.a_reach;
    j["residual"] = d.residual;
    emit_json(j, o.out, out);
    return kExitOk;
  }
  if (o.mode == "maxderiv") {
    MinimaxResult q = max_derivative_poly(terms_for_degree(o.degree), o.delta);
    nlohmann::json j = minimax_to_json(q);
    j["delta"] = o.delta;
    j["qprime0"] = q.poly.derivative_at_zero();
    emit_json(j, o.out, out);
    return kExitOk;
  }
  if (o.mode == "backchain") {
    BackchainResult r =
        backchained_schedule(terms_for_degree(o.degree), o.iters, o.delta);
    nlohmann::json j{{"a_star", r.a_star},
                     {"composition", composition_to_json(r.comp)},
                     {"delta", r.delta},
                     {"deltas", r.deltas},
                     {"phi_prime0", r.comp.derivative_at_zero()},
                     {"total_matmuls", r.comp.matmul_cost()}};
    emit_json(j, o.out, out);
    return kExitOk;
  }
  throw ParseError("unknown schedule mode \"" + o.mode +
                   "\" (use exact | delta | maxderiv | backchain)");
}

// ---------------------------------------------------------------------------
// orthogonalize

struct OrthoOpts {
  std::string input, output;
  std::string schedule_path;
  double delta = -1.0;
  bool has_delta = false;
  std::vector<int> degrees{3, 3, 3, 3, 3, 3, 3};
  double a_hint = -1.0;
  bool has_a_hint = false;
  double target_eps = 1e-6;
  std::string normalization = "fro";
  std::string trace_out;
  bool oracle = false;
  int threads = 1;
};

int cmd_orthogonalize(const OrthoOpts& o, std::ostream& out) {
  const int sources = (o.schedule_path.empty() ? 0 : 1) + (o.has_delta ? 1 : 0) +
                      (o.has_a_hint ? 1 : 0);
  if (sources != 1)
    throw ParseError(
        "provide exactly one of --schedule, --delta, --a-hint (the engine "
        "needs one source of singular-value interval information)");

  DenseMatrix a = read_matrix_file(o.input);
  OrthogonalizeConfig cfg;
  cfg.normalization = parse_normalization(o.normalization);
  cfg.target_eps = o.target_eps;
  cfg.oracle = o.oracle;
  cfg.threads = o.threads;
  if (!o.schedule_path.empty()) cfg.schedule = load_schedule_file(o.schedule_path);
  if (o.has_delta) cfg.delta_preprocess = delta_design(o.delta, o.degrees);
  if (o.has_a_hint) cfg.a_hint = o.a_hint;

  auto [x, trace] = orthogonalize(a, cfg);
  write_matrix_file(o.output, x);
  if (!o.trace_out.empty()) emit_text(o.trace_out, trace.to_csv(), out);

  const TraceRecord& last = trace.records.back();
  out << "orthogonalize: rows=" << a.rows() << " cols=" << a.cols()
      << " iters=" << last.iter << " matmuls=" << last.matmuls
      << " fro_err=" << fmt17(last.fro_err);
  if (last.spec_err) out << " spec_err=" << fmt17(*last.spec_err);
  out << " diverged=" << (trace.diverged ? 1 : 0) << "\n";
  return trace.diverged ? kExitNumeric : kExitOk;
}

// ---------------------------------------------------------------------------
// bench

struct BenchOpts {
  std::size_t n = 300;
  std::uint64_t seed = 1;
  std::vector<std::string> methods{"ns", "cans3", "cans5", "delta-preproc"};
  double target_eps = 1e-6;
  std::string normalization = "fro";
  std::string bounds = "exact";
  int iters = 120;
  double delta = 0.3;
  std::vector<int> preproc_degrees{3, 3, 3, 3, 3, 3, 3};
  int threads = 1;
  std::string out;
};

struct NormSetup {
  DenseMatrix x;            // normalized iterate
  std::vector<double> sig;  // its singular values (oracle, for spec_err)
  double scale = 1.0;
  long matmuls = 0;                  // charged to the method
  std::optional<DenseMatrix> gram0;  // Gram of x when already paid for
};

NormSetup normalize_for_bench(const DenseMatrix& a,
                              const std::vector<double>& sv,
                              const Normalization& nrm, int threads) {
  NormSetup s;
  const double fro = frobenius_norm(a);
  switch (nrm.kind) {
    case NormKind::frobenius:
      s.scale = fro;
      break;
    case NormKind::spectral_exact:
      s.scale = sv.front();
      break;
    case NormKind::gelfand: {
      // || (A^T A)^k ||_F^{1/2k} on the Frobenius-prescaled matrix; the
      // first Gram is reusable by the first polynomial stage.
      DenseMatrix pre = scale(a, 1.0 / fro);
      DenseMatrix g1 = gram(pre, threads);
      DenseMatrix p = g1;
      for (int i = 1; i < nrm.k; ++i) p = multiply(p, g1, threads);
      s.scale =
          std::pow(frobenius_norm(p), 1.0 / (2.0 * nrm.k)) * fro;
      s.matmuls = nrm.k;
      const double r = fro / s.scale;
      s.gram0 = scale(g1, r * r);
      break;
    }
  }
  if (!(s.scale > 0.0)) throw NumericError("bench: zero input matrix");
  s.x = scale(a, 1.0 / s.scale);
  s.sig.reserve(sv.size());
  for (double v : sv) s.sig.push_back(v / s.scale);
  return s;
}

double max_sigma_dev(const std::vector<double>& sig) {
  double m = 0.0;
  for (double v : sig) m = std::max(m, std::abs(v - 1.0));
  return m;
}

void bench_method(const std::string& method, const BenchOpts& o,
                  const DenseMatrix& a, const std::vector<double>& sv,
                  std::string& text) {
  const Normalization nrm = parse_normalization(o.normalization);
  const BoundsSpec bounds = parse_bounds(o.bounds);
  NormSetup s = normalize_for_bench(a, sv, nrm, o.threads);

  double lo = 0.0, hi = 1.0;  // certified interval for chain methods
  if (bounds.exact) {
    lo = s.sig.back();
    hi = s.sig.front();
  } else {
    lo = bounds.a0;
    hi = 1.0;
  }

  // Stage sources.
  std::vector<OddPolynomial> fixed_stages;  // delta-preproc prefix
  int chain_terms = 0;                      // 0 = classical Newton-Schulz
  std::string extra_meta;
  if (method == "ns") {
    chain_terms = 0;
  } else if (method == "cans3") {
    chain_terms = 2;
  } else if (method == "cans5") {
    chain_terms = 3;
  } else if (method == "delta-preproc") {
    DeltaDesign d = delta_design(o.delta, o.preproc_degrees);
    for (const auto& e : d.schedule.entries) fixed_stages.push_back(e.poly);
    lo = 1.0 - d.delta;
    hi = 1.0 + d.delta;
    chain_terms = 2;  // cubic extension after the preprocessing stages
    extra_meta = " a_reach=" + fmt17(d.a_reach) +
                 " sigma_min=" + fmt17(s.sig.back());
  } else {
    throw ParseError("unknown bench method \"" + method +
                     "\" (use ns | cans3 | cans5 | delta-preproc)");
  }

  std::ostringstream os;
  os << "# method=" << method << " n=" << o.n << " seed=" << o.seed
     << " normalization=" << o.normalization << " bounds=" << o.bounds
     << " target_eps=" << fmt17(o.target_eps) << " scale=" << fmt17(s.scale)
     << extra_meta << "\n";
  os << "iter,matmuls,fro_err,spec_err\n";

  DenseMatrix x = s.x;
  std::vector<double> sig = s.sig;
  long matmuls = s.matmuls;
  std::optional<DenseMatrix> reuse = std::move(s.gram0);

  auto emit_row = [&](int iter) {
    const double fro_err = identity_residual(gram(x, o.threads));
    os << iter << "," << matmuls << "," << fmt17(fro_err) << ","
       << fmt17(max_sigma_dev(sig)) << "\n";
    return fro_err;
  };

  bool diverged = false;
  bool converged = max_sigma_dev(sig) <= o.target_eps;
  emit_row(0);
  int iter = 0;
  std::size_t fixed_idx = 0;
  while (!converged && !diverged && iter < o.iters) {
    OddPolynomial p = OddPolynomial::newton_schulz();
    if (fixed_idx < fixed_stages.size()) {
      p = fixed_stages[fixed_idx++];
    } else if (chain_terms >= 2) {
      MinimaxResult st = minimax_solve(chain_terms, lo, hi);
      p = st.poly;
      lo = 1.0 - st.epsilon;
      hi = 1.0 + st.epsilon;
    }
    if (reuse) {
      x = apply_odd_poly_with_gram(x, p, *reuse, o.threads);
      matmuls += p.matmul_cost() - 1;
      reuse.reset();
    } else {
      x = apply_odd_poly(x, p, o.threads);
      matmuls += p.matmul_cost();
    }
    for (double& v : sig) v = p(v);
    ++iter;
    const double fro_err = emit_row(iter);
    if (fro_err > 1e6 || !std::isfinite(fro_err)) diverged = true;
    converged = max_sigma_dev(sig) <= o.target_eps;
  }
  os << "# method=" << method << " converged=" << (converged ? 1 : 0)
     << " diverged=" << (diverged ? 1 : 0) << " iterations=" << iter
     << " matmuls=" << matmuls << "\n";
  text += os.str();
}

int cmd_bench(const BenchOpts& o, std::ostream& out) {
  if (o.n == 0) throw ParseError("bench requires n >= 1");
  if (o.n > kSvdSizeCap)
    throw NumericError("bench: spectral oracle capped at n <= 512");
  DenseMatrix a = gaussian_matrix(o.n, o.n, o.seed);
  SvdResult svd = reference_svd(a);  // one oracle factorization, not charged

  std::string text;
  for (const auto& m : o.methods) bench_method(m, o, a, svd.s, text);
  emit_text(o.out, text, out);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// verify

struct VerifyOpts {
  std::string composition;
  double delta = -1.0;
  bool has_delta = false;
  double bmax = -1.0;
  double tol = 1e-6;
  double a_star = -1.0;
  bool has_a_star = false;
  std::size_t grid = 10000;
  std::string out;
};

struct Iv {
  double lo = 0.0, hi = 0.0;
};

// Range of the odd polynomial over [iv.lo, iv.hi]; the interval may cross 0.
Iv range_odd(const OddPolynomial& p, Iv iv, std::size_t grid) {
  if (iv.lo == iv.hi) {
    const double v = p(iv.lo);
    return {v, v};
  }
  if (iv.lo >= 0.0) {
    auto [mn, mx] = range_on_interval(p, iv.lo, iv.hi, grid);
    return {mn, mx};
  }
  if (iv.hi <= 0.0) {
    auto [mn, mx] = range_on_interval(p, -iv.hi, -iv.lo, grid);
    return {-mx, -mn};
  }
  auto [pn, px] = range_on_interval(p, 0.0, iv.hi, grid);
  auto [nn, nx] = range_on_interval(p, 0.0, -iv.lo, grid);
  return {std::min(pn, -nx), std::max(px, -nn)};
}

int cmd_verify(const VerifyOpts& o, std::ostream& out) {
  nlohmann::json cj = load_json_file(o.composition);
  double delta = o.has_delta ? o.delta : -1.0;
  Composition comp = [&] {
    if (cj.is_array()) return composition_from_json(cj);
    if (cj.is_object() && cj.contains("composition")) {
      if (!o.has_delta && cj.contains("delta") && cj["delta"].is_number())
        delta = cj["delta"].get<double>();
      return composition_from_json(cj["composition"]);
    }
    throw ParseError(o.composition +
                     ": expected a polynomial array or an object with "
                     "\"composition\"");
  }();
  if (!(delta > 0.0))
    throw ParseError("verify needs --delta (or a composition file carrying "
                     "one)");
  const double bmax = o.bmax > 0.0 ? o.bmax : 1.0 + delta;

  // Certificate: propagate [a, bmax] through the stages (each stage range is
  // exact up to root refinement) and require the final interval to land in
  // [1-delta-tol, 1+delta+tol].
  auto final_range = [&](double a) {
    Iv iv{a, bmax};
    for (const auto& p : comp.polys()) {
      iv = range_odd(p, iv, o.grid);
      if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi)) break;
    }
    return iv;
  };
  auto certified = [&](double a) {
    Iv iv = final_range(a);
    return std::isfinite(iv.lo) && std::isfinite(iv.hi) &&
           iv.lo >= 1.0 - delta - o.tol && iv.hi <= 1.0 + delta + o.tol;
  };

  bool contained = false;
  double a_star = o.a_star;
  if (o.has_a_star) {
    contained = certified(a_star);
  } else {
    const double right = bmax * (1.0 - 1e-12);
    if (certified(right)) {
      contained = true;
      if (certified(0.0)) {
        a_star = 0.0;
      } else {
        double lo = 0.0, hi = right;
        for (int i = 0; i < 100; ++i) {
          const double mid = 0.5 * (lo + hi);
          (certified(mid) ? hi : lo) = mid;
        }
        a_star = hi;
      }
    } else {
      a_star = std::numeric_limits<double>::quiet_NaN();
    }
  }

  Iv fin = std::isnan(a_star) ? final_range(bmax * (1.0 - 1e-12))
                              : final_range(a_star);
  const double violation =
      std::max({0.0, (1.0 - delta) - fin.lo, fin.hi - (1.0 + delta)});

  nlohmann::json j{{"a_star", a_star},
                   {"bmax", bmax},
                   {"contained", contained},
                   {"delta", delta},
                   {"max_violation", violation},
                   {"phi_prime0", comp.derivative_at_zero()},
                   {"range_hi", fin.hi},
                   {"range_lo", fin.lo},
                   {"stages", comp.size()},
                   {"total_matmuls", comp.matmul_cost()}};
  if (!o.out.empty()) emit_json(j, o.out, out);
  out << "verify: stages=" << comp.size() << " matmuls=" << comp.matmul_cost()
      << " phi_prime0=" << fmt17(comp.derivative_at_zero()) << "\n"
      << "verify: delta=" << fmt17(delta) << " bmax=" << fmt17(bmax)
      << " a_star=" << fmt17(a_star) << " range=[" << fmt17(fin.lo) << ","
      << fmt17(fin.hi) << "]\n"
      << "verify: contained=" << (contained ? "yes" : "no")
      << " max_violation=" << fmt17(violation) << "\n";
  return contained ? kExitOk : kExitNumeric;
}

// ---------------------------------------------------------------------------
// retract

struct RetractOpts {
  std::string x_path, xi_path;
  double alpha = 1.0;
  int s = 1;
  int threads = 1;
  std::string out;
};

int cmd_retract(const RetractOpts& o, std::ostream& out) {
  DenseMatrix xm = read_matrix_file(o.x_path);
  DenseMatrix zm = read_matrix_file(o.xi_path);
  if (!xm.same_shape(zm))
    throw ParseError("X and xi must have the same shape");
  std::optional<StiefelPoint> x;
  try {
    x.emplace(std::move(xm));
  } catch (const std::invalid_argument& e) {
    throw NumericError(std::string("retract: ") + e.what());
  }
  const double input_resid = identity_residual(gram(x->x, o.threads));
  TangentVector v = project_tangent(*x, zm);
  v.z = scale(v.z, o.alpha);
  StiefelPoint r = polar_retract(*x, v, o.s, o.threads);
  const double output_resid = identity_residual(gram(r.x, o.threads));
  if (!o.out.empty()) write_matrix_file(o.out, r.x);
  out << "retract: rows=" << r.n() << " cols=" << r.p()
      << " step_norm=" << fmt17(frobenius_norm(v.z))
      << " input_residual=" << fmt17(input_resid)
      << " output_residual=" << fmt17(output_resid) << "\n";
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Optimal odd polynomial iterations for matrix orthogonalization"};
  app.require_subcommand(1);

  RemezOpts ro;
  CLI::App* c_remez =
      app.add_subcommand("remez", "Solve the odd minimax problem on [a, b]");
  c_remez->add_option("--a", ro.a, "Left interval endpoint")->required();
  c_remez->add_option("--b", ro.b, "Right interval endpoint")->required();
  c_remez->add_option("--degree", ro.degree, "Odd polynomial degree (1..15)");
  c_remez->add_option("--tol", ro.tol, "Relative equioscillation defect");
  c_remez->add_option("--max-iter", ro.max_iter, "Exchange iteration cap");
  c_remez->add_option("--out", ro.out, "Write the JSON result to this file");

  ScheduleOpts so;
  CLI::App* c_sched =
      app.add_subcommand("schedule", "Design an iteration schedule");
  c_sched->add_option("--mode", so.mode,
                      "exact | delta | maxderiv | backchain");
  c_sched->add_option("--a", so.a, "Left boundary (exact mode)");
  c_sched->add_option("--b", so.b, "Right boundary (exact mode)");
  c_sched->add_option("--degrees", so.degrees, "Odd stage degrees")
      ->delimiter(',');
  c_sched->add_option("--delta", so.delta, "Target residual half-width");
  c_sched->add_option("--bmax", so.bmax,
                      "Right boundary for delta mode (default 1+delta)");
  c_sched->add_option("--eps-tol", so.eps_tol, "Delta-design residual bound");
  c_sched->add_option("--degree", so.degree,
                      "Stage degree (maxderiv/backchain)");
  c_sched->add_option("--iters", so.iters, "Backchain length");
  c_sched->add_option("--out", so.out, "Write the JSON result to this file");

  OrthoOpts oo;
  CLI::App* c_ortho =
      app.add_subcommand("orthogonalize", "Orthogonalize a dense matrix");
  c_ortho->add_option("--input", oo.input, "Input matrix file")->required();
  c_ortho->add_option("--output", oo.output, "Output matrix file")->required();
  c_ortho->add_option("--schedule", oo.schedule_path,
                      "Apply a precomputed schedule (JSON)");
  CLI::Option* ortho_delta = c_ortho->add_option(
      "--delta", oo.delta, "Run delta-orthogonalization preprocessing");
  c_ortho->add_option("--degrees", oo.degrees,
                      "Degrees for the delta preprocessing design")
      ->delimiter(',');
  CLI::Option* ortho_ahint = c_ortho->add_option(
      "--a-hint", oo.a_hint,
      "Known lower bound on the normalized singular values");
  c_ortho->add_option("--target-eps", oo.target_eps,
                      "Certified final half-width");
  c_ortho->add_option("--normalization", oo.normalization,
                      "fro | gelfand:k | spectral");
  c_ortho->add_option("--trace-out", oo.trace_out, "Write a CSV trace here");
  c_ortho->add_flag("--oracle", oo.oracle,
                    "Record oracle spectral errors in the trace");
  c_ortho->add_option("--threads", oo.threads, "Worker threads for matmul");

  BenchOpts bo;
  CLI::App* c_bench =
      app.add_subcommand("bench", "Convergence/cost benchmark on a seeded "
                                  "Gaussian matrix");
  c_bench->add_option("--n", bo.n, "Matrix size (n x n, <= 512)");
  c_bench->add_option("--seed", bo.seed, "RNG seed");
  c_bench->add_option("--methods", bo.methods,
                      "ns | cans3 | cans5 | delta-preproc")
      ->delimiter(',');
  c_bench->add_option("--target-eps", bo.target_eps,
                      "Stop when max |sigma-1| falls below this");
  c_bench->add_option("--normalization", bo.normalization,
                      "fro | gelfand:k | spectral");
  c_bench->add_option("--bounds", bo.bounds,
                      "exact | overestimate:a0 | underestimate:a0");
  c_bench->add_option("--iters", bo.iters, "Stage cap per method");
  c_bench->add_option("--delta", bo.delta, "delta-preproc target");
  c_bench->add_option("--preproc-degrees", bo.preproc_degrees,
                      "delta-preproc design degrees")
      ->delimiter(',');
  c_bench->add_option("--threads", bo.threads, "Worker threads for matmul");
  c_bench->add_option("--out", bo.out, "Write the CSV report to this file");

  VerifyOpts vo;
  CLI::App* c_verify = app.add_subcommand(
      "verify", "Certify a composition's containment on [a*, bmax]");
  c_verify->add_option("--composition", vo.composition,
                       "Composition JSON (array or backchain output)")
      ->required();
  CLI::Option* verify_delta =
      c_verify->add_option("--delta", vo.delta, "Target half-width");
  c_verify->add_option("--bmax", vo.bmax,
                       "Right boundary of the input interval (default "
                       "1+delta)");
  c_verify->add_option("--tol", vo.tol, "Certificate slack");
  c_verify->add_option("--grid", vo.grid, "Stage range-scan grid density");
  CLI::Option* verify_astar = c_verify->add_option(
      "--a-star", vo.a_star, "Certify this left boundary instead of searching");
  c_verify->add_option("--out", vo.out, "Write the JSON certificate here");

  RetractOpts to;
  CLI::App* c_retract = app.add_subcommand(
      "retract", "Project a direction and apply the polar retraction");
  c_retract->add_option("--x", to.x_path, "Orthonormal base point file")
      ->required();
  c_retract->add_option("--xi", to.xi_path, "Direction matrix file")
      ->required();
  c_retract->add_option("--alpha", to.alpha, "Step size");
  c_retract->add_option("--s", to.s, "Retraction polynomial rounds");
  c_retract->add_option("--threads", to.threads, "Worker threads for matmul");
  c_retract->add_option("--out", to.out, "Write the retracted point here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Error& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  oo.has_delta = ortho_delta->count() > 0;
  oo.has_a_hint = ortho_ahint->count() > 0;
  vo.has_delta = verify_delta->count() > 0;
  vo.has_a_star = verify_astar->count() > 0;

  try {
    if (c_remez->parsed()) return cmd_remez(ro, out);
    if (c_sched->parsed()) return cmd_schedule(so, out);
    if (c_ortho->parsed()) return cmd_orthogonalize(oo, out);
    if (c_bench->parsed()) return cmd_bench(bo, out);
    if (c_verify->parsed()) return cmd_verify(vo, out);
    if (c_retract->parsed()) return cmd_retract(to, out);
    err << "error: no subcommand\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NumericError& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("cans");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace cans::cli
