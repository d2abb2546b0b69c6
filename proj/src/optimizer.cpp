#include "fastcubic/optimizer.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>

#include "fastcubic/errors.hpp"

namespace fastcubic {
namespace {

constexpr std::size_t kDenseLimit = 200;

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

long long solver_hv(const HvCounter& c, std::size_t n) {
  return static_cast<long long>(std::ceil(c.equivalent_calls(CallSite::Solver, n)));
}

struct StepOutcome {
  Vector h;
  double m = 0.0;
  std::string branch;
  double lambda = 0.0;
};

// Dense final measurements, tallied as verification products.
void finish_report(RunReport& rep, const OracleSet& oracle, const Vector& x, double eps, bool certify,
                   const std::shared_ptr<HvCounter>& counter) {
  rep.final_f = oracle.value(x);
  rep.observed_decrease = rep.f0 - rep.final_f;
  if (certify && oracle.dim <= kDenseLimit) {
    rep.certificate = check_certificate(oracle, x, eps, counter);
    rep.final_grad_norm = rep.certificate->grad_norm;
    rep.final_lambda_min = rep.certificate->lambda_min_hessian;
  } else {
    rep.final_grad_norm = oracle.gradient(x).norm();
  }
  rep.hv_calls = solver_hv(*counter, oracle.n_components);
  rep.verification_hv_calls = counter->full_calls(CallSite::Verification);
}

// Shared outer loop of the cubic-regularized methods.
RunResult cubic_outer_loop(const std::string& method, const OracleSet& oracle, const Vector& x0,
                           const FastCubicConfig& cfg,
                           const std::function<StepOutcome(const CubicSubproblem&)>& step) {
  cfg.validate();
  oracle.params.validate();
  if (static_cast<std::size_t>(x0.size()) != oracle.dim) throw DimensionMismatch(method + ": x0 dimension");
  const auto t0 = Clock::now();
  auto counter = std::make_shared<HvCounter>();
  const double threshold = stopping_threshold(cfg.eps, oracle.params.L, cfg.c_const);

  RunResult out;
  RunReport& rep = out.report;
  rep.method = method;
  Vector x = x0;
  double f = oracle.value(x);
  rep.f0 = f;
  rep.status = RunStatus::MaxOuterReached;

  for (int t = 0; t < cfg.max_outer; ++t) {
    CubicSubproblem p = CubicSubproblem::at(oracle, x, counter);
    ++rep.grad_calls;
    const long long hv_before = solver_hv(*counter, oracle.n_components);
    StepOutcome s = step(p);
    const long long cum_hv = solver_hv(*counter, oracle.n_components);
    const long long inner_hv = cum_hv - hv_before;
    rep.iterations.push_back({t, f, p.g.norm(), s.m, s.branch, s.lambda, inner_hv, cum_hv, rep.grad_calls});
    rep.outer_iters = t + 1;

    const Vector x_next = x + s.h;
    if (x_next.norm() > cfg.domain_radius) rep.left_ball = true;
    const double f_next = oracle.value(x_next);
    const bool final = s.m > threshold;
    if (!final && !rep.left_ball && f_next > f + 1e-10 * std::max(1.0, std::abs(f))) {
      throw AlgorithmInvariantViolated(method + ": objective increased from " + std::to_string(f) + " to " +
                                       std::to_string(f_next) + " at iteration " + std::to_string(t));
    }
    x = x_next;
    f = f_next;
    if (final) {
      rep.converged = true;
      rep.status = RunStatus::Converged;
      break;
    }
  }
  if (rep.left_ball) rep.status = RunStatus::LeftCertifiedBall;
  finish_report(rep, oracle, x, cfg.eps, cfg.certify, counter);
  rep.wall_ms = elapsed_ms(t0);
  out.x = std::move(x);
  return out;
}

}  // namespace

std::string to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Converged: return "Converged";
    case RunStatus::MaxOuterReached: return "MaxOuterReached";
    case RunStatus::LeftCertifiedBall: return "LeftCertifiedBall";
    case RunStatus::Error: return "Error";
  }
  return "Error";
}

void FastCubicConfig::validate() const {
  if (!(eps > 0.0)) throw InvalidArgument("eps must be positive");
  if (!(c_const >= 1.0)) throw InvalidArgument("c_const must be at least 1");
  if (max_outer <= 0) throw InvalidArgument("max_outer must be positive");
  if (!(domain_radius > 0.0)) throw InvalidArgument("domain_radius must be positive");
}

double kappa_for(double eps, double L) { return std::sqrt(900.0 / (eps * L)); }

double stopping_threshold(double eps, double L, double c_const) {
  return -std::pow(eps, 1.5) / (c_const * std::sqrt(L));
}

RunResult fast_cubic(const OracleSet& oracle, const Vector& x0, const FastCubicConfig& cfg) {
  SolverConfig sc;
  sc.kappa = kappa_for(cfg.eps, oracle.params.L);
  sc.strategy = cfg.strategy;
  sc.eps_tilde_floor = cfg.eps_tilde_floor;
  sc.power_iterations = cfg.power_iterations;
  SeededRng rng(cfg.seed);
  return cubic_outer_loop("fastcubic", oracle, x0, cfg, [&](const CubicSubproblem& p) {
    const CubicSolution sol = fast_cubic_min(p, sc, rng);
    const StepChoice c = choose_step(p, sol);
    return StepOutcome{c.h, c.m, to_string(sol.branch), sol.lambda};
  });
}

RunResult exact_np_cubic(const OracleSet& oracle, const Vector& x0, const FastCubicConfig& cfg) {
  if (oracle.dim > kDenseLimit) throw InvalidArgument("exact_np_cubic: dense path needs dim <= 200");
  return cubic_outer_loop("exact_np", oracle, x0, cfg, [&](const CubicSubproblem& p) {
    const ExactSolution ex = exact_solve(p);
    return StepOutcome{ex.h_star, ex.m_star, "exact", ex.lambda_star};
  });
}

RunResult gradient_descent(const OracleSet& oracle, const Vector& x0, double eps, long long max_iter,
                           double domain_radius, long long record_every) {
  if (!(eps > 0.0)) throw InvalidArgument("gradient_descent: eps must be positive");
  if (static_cast<std::size_t>(x0.size()) != oracle.dim) throw DimensionMismatch("gradient_descent: x0 dimension");
  oracle.params.validate();
  const auto t0 = Clock::now();
  auto counter = std::make_shared<HvCounter>();
  const double step = 1.0 / oracle.params.L2;
  constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

  RunResult out;
  RunReport& rep = out.report;
  rep.method = "gd";
  rep.status = RunStatus::MaxOuterReached;
  Vector x = x0;
  rep.f0 = oracle.value(x);
  for (long long k = 0; k <= max_iter; ++k) {
    const Vector g = oracle.gradient(x);
    ++rep.grad_calls;
    require_finite(g, "gradient");
    const double gn = g.norm();
    const bool done = gn <= eps;
    if (k < 100 || k % std::max(1LL, record_every) == 0 || done || k == max_iter) {
      rep.iterations.push_back({static_cast<int>(k), oracle.value(x), gn, kNaN, "gd", 0.0, 0, 0, rep.grad_calls});
    }
    rep.outer_iters = static_cast<int>(k);
    if (done) {
      rep.converged = true;
      rep.status = RunStatus::Converged;
      break;
    }
    if (k == max_iter) break;
    x -= step * g;
    if (x.norm() > domain_radius) rep.left_ball = true;
  }
  if (rep.left_ball) rep.status = RunStatus::LeftCertifiedBall;
  finish_report(rep, oracle, x, eps, true, counter);
  rep.wall_ms = elapsed_ms(t0);
  out.x = std::move(x);
  return out;
}

}  // namespace fastcubic
