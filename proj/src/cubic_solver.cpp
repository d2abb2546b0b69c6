#include "fastcubic/cubic_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fastcubic/eigen_approx.hpp"
#include "fastcubic/errors.hpp"

namespace fastcubic {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// v ~ -(H + lambda I)^{-1} g to absolute accuracy `abs_eps`.
SolveResult solve_step(const CubicSubproblem& p, double lambda, double mu_lower, double abs_eps,
                       SolverStrategy strategy, SeededRng& rng) {
  const ShiftedOperator op(p.h_op, lambda, mu_lower, std::max(lambda + p.L2, mu_lower));
  const double gnorm = p.g.norm();
  const double eps_rel = gnorm > 0.0 ? std::min(abs_eps / gnorm, 0.5) : 0.5;
  SolveResult r = solve_shifted(op, p.g, eps_rel, strategy, rng);
  r.x = -r.x;
  return r;
}

void validate(const CubicSubproblem& p, double kappa) {
  if (!(kappa > 0.0)) throw InvalidArgument("fast_cubic_min: kappa must be positive");
  if (!(p.L > 0.0) || !(p.L2 > 0.0)) throw InvalidArgument("fast_cubic_min: L and L2 must be positive");
  if (p.h_op.dim() != p.dim()) throw DimensionMismatch("fast_cubic_min: operator and gradient disagree");
  require_finite(p.g, "gradient");
}

}  // namespace

std::string to_string(Branch b) {
  switch (b) {
    case Branch::Case1Direct: return "case1_direct";
    case Branch::Case1Binary: return "case1_binary";
    case Branch::Case2Eig: return "case2_eig";
  }
  return "unknown";
}

double theory_eps_tilde_log10(const CubicSubproblem& p, double kappa) {
  const double B = crude_lambda_bound(p, kappa);
  const double m = std::max({p.L, p.g.norm(), 0.3 * kappa, B, 1.0});
  return -4.0 - 20.0 * std::log10(m);
}

double resolve_eps_tilde(const CubicSubproblem& p, const SolverConfig& cfg) {
  if (cfg.eps_tilde > 0.0) return cfg.eps_tilde;
  const double theory = std::pow(10.0, theory_eps_tilde_log10(p, cfg.kappa));
  return std::clamp(theory, cfg.eps_tilde_floor, cfg.eps_tilde_cap);
}

int lambda_step_cap(double B, double kappa) {
  return static_cast<int>(std::ceil(std::log(10.0 * B * kappa) / std::log(4.0 / 3.0))) + 2;
}

long long binary_search_bound(double lambda_hi, double lambda_lo, double eps_tilde, double L, double B,
                              double kappa) {
  const double c1 = std::min(3.0 / (10.0 * kappa), 1.0);
  const double e = L * eps_tilde * c1 / (40.0 * B);
  const double width = lambda_hi - lambda_lo;
  if (width <= e) return 1;
  return static_cast<long long>(std::ceil(std::log2(width / e))) + 1;
}

CubicSolution binary_search(const CubicSubproblem& p, double lambda_hi, double lambda_lo, double eps_tilde,
                            const SolverConfig& cfg, SeededRng& rng, double mu_lower) {
  validate(p, cfg.kappa);
  if (!(lambda_hi >= lambda_lo)) throw InvalidArgument("binary_search: need lambda_hi >= lambda_lo");
  if (!(eps_tilde > 0.0)) throw InvalidArgument("binary_search: eps_tilde must be positive");
  if (mu_lower <= 0.0) mu_lower = std::max(lambda_lo - p.L2, 3.0 / (10.0 * cfg.kappa));

  CubicSolution out;
  out.B = crude_lambda_bound(p, cfg.kappa);
  out.eps_tilde = eps_tilde;
  out.eps_tilde_theory_log10 = theory_eps_tilde_log10(p, cfg.kappa);
  out.eps_hat = 1.0 / (60.0 * out.B);
  out.branch = Branch::Case1Binary;
  out.binary_bound = binary_search_bound(lambda_hi, lambda_lo, eps_tilde, p.L, out.B, cfg.kappa);
  const long long cap = out.binary_bound + 5;

  double hi = lambda_hi;
  double lo = lambda_lo;
  const double band = p.L * eps_tilde;
  for (long long t = 1; t <= cap; ++t) {
    const double mid = 0.5 * (hi + lo);
    SolveResult r = solve_step(p, mid, mu_lower, 0.5 * eps_tilde, cfg.strategy, rng);
    out.hv_calls += r.report.hv_calls;
    out.binary_iterations = static_cast<int>(t);
    const double lv = p.L * r.x.norm();
    TraceRecord rec{static_cast<int>(t), mid, r.x.norm(), kNaN, "", mu_lower, r.report.hv_calls, true};
    if (std::abs(lv - 2.0 * mid) <= band) {
      rec.decision = "case1";
      out.trace.push_back(rec);
      out.lambda = mid;
      out.v = std::move(r.x);
      return out;
    }
    if (lv + band <= 2.0 * mid) {
      rec.decision = "probe-hi";
      hi = mid;
    } else {
      rec.decision = "probe-lo";
      lo = mid;
    }
    out.trace.push_back(rec);
  }
  throw AlgorithmInvariantViolated("binary_search: no band hit within " + std::to_string(cap) + " iterations");
}

CubicSolution fast_cubic_min(const CubicSubproblem& p, const SolverConfig& cfg, SeededRng& rng) {
  validate(p, cfg.kappa);
  const double kappa = cfg.kappa;
  const double B = crude_lambda_bound(p, kappa);
  const double eps_tilde = resolve_eps_tilde(p, cfg);
  const double eps_hat = 1.0 / (60.0 * B);
  const double gap_floor = 3.0 / (10.0 * kappa);
  const int cap = cfg.max_outer_lambda_steps > 0 ? cfg.max_outer_lambda_steps : lambda_step_cap(B, kappa);
  const double band = p.L * eps_tilde;

  CubicSolution out;
  out.B = B;
  out.eps_tilde = eps_tilde;
  out.eps_tilde_theory_log10 = theory_eps_tilde_log10(p, kappa);
  out.eps_hat = eps_hat;

  double lambda = 2.0 * B;
  double lambda_prev = kNaN;
  double mu = std::max(gap_floor, lambda - p.L2);
  for (int i = 0;; ++i) {
    if (i > cap) {
      throw AlgorithmInvariantViolated("fast_cubic_min: more than " + std::to_string(cap) + " lambda steps");
    }
    out.lambda_steps = i + 1;
    SolveResult r = solve_step(p, lambda, mu, eps_tilde, cfg.strategy, rng);
    out.hv_calls += r.report.hv_calls;
    const double vn = r.x.norm();
    const double lv = p.L * vn;
    TraceRecord rec{i, lambda, vn, kNaN, "", mu, r.report.hv_calls};

    if (std::abs(lv - 2.0 * lambda) <= band) {
      rec.decision = "case1";
      out.trace.push_back(rec);
      out.lambda = lambda;
      out.v = std::move(r.x);
      out.branch = Branch::Case1Direct;
      return out;
    }
    if (lv > 2.0 * lambda + band) {
      if (i == 0) throw AlgorithmInvariantViolated("fast_cubic_min: L||v|| exceeds 2 lambda at lambda_0 = 2B");
      rec.decision = "binary";
      out.trace.push_back(rec);
      CubicSolution bs = binary_search(p, lambda_prev, lambda, eps_tilde, cfg, rng, mu);
      out.lambda = bs.lambda;
      out.v = std::move(bs.v);
      out.branch = Branch::Case1Binary;
      out.hv_calls += bs.hv_calls;
      out.binary_iterations = bs.binary_iterations;
      out.binary_bound = bs.binary_bound;
      out.trace.insert(out.trace.end(), bs.trace.begin(), bs.trace.end());
      return out;
    }

    // Eigenvector path: estimate the gap lambda + lambda_min(H) through the
    // leading eigenvalue of (H + lambda I)^{-1}.
    const ShiftedOperator op(p.h_op, lambda, mu, lambda + p.L2);
    EigResult lead = inverse_power_leading(op, rng, -1.0, cfg.strategy, cfg.power_iterations);
    const SolveResult wt = solve_shifted(op, lead.vector, std::min(eps_hat, 0.5), cfg.strategy, rng);
    out.hv_calls += lead.hv_calls + wt.report.hv_calls;
    rec.hv_calls += lead.hv_calls + wt.report.hv_calls;
    const double denom = wt.x.dot(lead.vector) - eps_hat;
    if (!(denom > 0.0)) throw NumericalBreakdown("fast_cubic_min: non-positive gap estimate");
    const double delta = 0.5 / denom;
    rec.delta = delta;

    if (delta > 1.0 / (2.0 * kappa)) {
      rec.decision = "shrink";
      out.trace.push_back(rec);
      lambda_prev = lambda;
      lambda = std::max(0.0, lambda - 0.5 * delta);
      // The old gap is at least 8 delta / 5, so the new one is at least 11 delta / 10.
      mu = std::max({gap_floor, 1.1 * delta, lambda - p.L2});
      continue;
    }

    rec.decision = "eig";
    out.trace.push_back(rec);
    MinEigOptions eo;
    eo.strategy = cfg.strategy;
    eo.power_iterations = cfg.power_iterations;
    eo.initial_shift = lambda;
    eo.initial_gap_lower = mu;
    EigResult vmin = approx_min_eigvec(p.h_op, p.L2, kappa, rng, &p.g, eo);
    out.hv_calls += vmin.hv_calls;
    out.trace.back().hv_calls += vmin.hv_calls;
    out.lambda = lambda;
    out.v = std::move(r.x);
    out.v_min = std::move(vmin.vector);
    out.branch = Branch::Case2Eig;
    return out;
  }
}

StepChoice choose_step(const CubicSubproblem& p, const CubicSolution& sol) {
  StepChoice c;
  c.h = sol.v;
  c.m = eval_m(p, sol.v);
  if (sol.v_min) {
    Vector alt = (sol.lambda / (2.0 * p.L)) * *sol.v_min;
    const double m_alt = eval_m(p, alt);
    if (m_alt < c.m) {
      c.h = std::move(alt);
      c.m = m_alt;
      c.from_eigvector = true;
    }
  }
  return c;
}

}  // namespace fastcubic
