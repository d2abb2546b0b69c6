#include "fastcubic/linear_solver.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "fastcubic/errors.hpp"

namespace fastcubic {
namespace {

void check_eps(double eps_rel) {
  if (!(eps_rel > 0.0 && eps_rel < 1.0)) throw InvalidArgument("eps_rel must lie in (0, 1)");
}

double log_factor(double kappa, double mu, double eps_rel) {
  return std::max(1.0, std::log(std::sqrt(kappa + 1.0) * std::max(1.0, 1.0 / mu) / eps_rel));
}

}  // namespace

ShiftedOperator::ShiftedOperator(HvOperator base, double shift, double mu_lower, double L_upper)
    : base_(std::move(base)), shift_(shift), mu_lower_(mu_lower), L_upper_(L_upper) {
  if (!(mu_lower > 0.0)) throw InvalidArgument("ShiftedOperator: mu_lower must be positive");
  if (!(L_upper >= mu_lower)) throw InvalidArgument("ShiftedOperator: need L_upper >= mu_lower");
}

Vector ShiftedOperator::apply(const Vector& v) const { return base_.apply(v) + shift_ * v; }

Vector ShiftedOperator::apply_component(std::size_t i, const Vector& v) const {
  return base_.apply_component(i, v) + shift_ * v;
}

std::string to_string(SolverStrategy s) { return s == SolverStrategy::AGD ? "agd" : "svrg"; }

SolverStrategy solver_strategy_from_string(const std::string& s) {
  if (s == "agd") return SolverStrategy::AGD;
  if (s == "svrg") return SolverStrategy::SVRG;
  throw ConfigError("unknown solver strategy '" + s + "' (expected agd or svrg)");
}

long long agd_iteration_bound(double kappa_op, double mu_lower, double eps_rel) {
  const double k = std::max(kappa_op, 1.0);
  return static_cast<long long>(std::ceil(2.0 * std::sqrt(k) * log_factor(k, mu_lower, eps_rel))) + 1;
}

SolveResult solve_agd(const ShiftedOperator& op, const Vector& b, double eps_rel, long long max_iter,
                      const Vector* x0) {
  check_eps(eps_rel);
  if (static_cast<std::size_t>(b.size()) != op.dim()) throw DimensionMismatch("solve_agd: rhs dimension");

  SolveResult out;
  out.report.strategy = SolverStrategy::AGD;
  out.report.residual_bound = eps_rel;
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    out.x = Vector::Zero(b.size());
    out.report.early_exit = true;
    return out;
  }

  const double kappa = std::max(op.condition_bound(), 1.0);
  const long long bound = agd_iteration_bound(kappa, op.mu_lower(), eps_rel);
  const long long budget = max_iter < 0 ? bound : max_iter;
  const double step = 1.0 / op.L_upper();
  const double sk = std::sqrt(kappa);
  const double momentum = (sk - 1.0) / (sk + 1.0);
  const double tol = eps_rel * op.mu_lower() * bnorm;

  Vector x = Vector::Zero(b.size());
  if (x0 != nullptr && x0->size() == b.size() && x0->allFinite()) {
    const Vector r0 = op.apply(*x0) - b;
    ++out.report.hv_calls;
    if (r0.norm() < bnorm) x = *x0;
  }
  Vector y = x;
  for (long long k = 0; k < std::min(budget, bound); ++k) {
    const Vector r = op.apply(y) - b;
    ++out.report.hv_calls;
    ++out.report.iterations;
    if (!r.allFinite()) throw NumericalBreakdown("solve_agd: non-finite residual");
    if (r.norm() <= tol) {
      out.x = y;
      out.report.early_exit = true;
      return out;
    }
    Vector x_next = y - step * r;
    y = x_next + momentum * (x_next - x);
    x = std::move(x_next);
  }
  if (budget < bound) {
    throw SolverBudgetExceeded("solve_agd: max_iter " + std::to_string(budget) +
                               " exhausted before the a-priori bound " + std::to_string(bound));
  }
  require_finite(x, "solve_agd iterate");
  out.x = std::move(x);
  return out;
}

long long svrg_epoch_budget(const ShiftedOperator& op, double eps_rel) {
  const double kappa = std::max(op.condition_bound(), 1.0);
  const double n = static_cast<double>(op.n_components());
  return static_cast<long long>(std::ceil(4.0 * (1.0 + kappa / n) * log_factor(kappa, op.mu_lower(), eps_rel))) + 20;
}

SolveResult solve_svrg(const ShiftedOperator& op, const Vector& b, double eps_rel, SeededRng& rng,
                       long long max_epochs, const Vector* x0) {
  check_eps(eps_rel);
  if (!op.has_components()) throw InvalidArgument("solve_svrg: operator is not a finite sum");
  if (static_cast<std::size_t>(b.size()) != op.dim()) throw DimensionMismatch("solve_svrg: rhs dimension");

  SolveResult out;
  out.report.strategy = SolverStrategy::SVRG;
  out.report.residual_bound = eps_rel;
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    out.x = Vector::Zero(b.size());
    out.report.early_exit = true;
    return out;
  }

  const std::size_t n = op.n_components();
  const long long epochs = max_epochs < 0 ? svrg_epoch_budget(op, eps_rel) : max_epochs;
  const std::size_t inner = 2 * n;
  const double step = 1.0 / (3.0 * op.L_upper());
  const double tol = eps_rel * op.mu_lower() * bnorm;
  const double shift = op.shift();
  const HvOperator& base = op.base();

  Vector snapshot = Vector::Zero(b.size());
  if (x0 != nullptr && x0->size() == b.size() && x0->allFinite()) snapshot = *x0;
  auto finish = [&](Vector x) {
    out.report.hv_calls = (out.report.component_hv_calls + static_cast<long long>(n) - 1) /
                          static_cast<long long>(n);
    out.x = std::move(x);
    return out;
  };

  for (long long epoch = 0; epoch < epochs; ++epoch) {
    Vector full = Vector::Zero(b.size());
    for (std::size_t i = 0; i < n; ++i) full += base.apply_component(i, snapshot);
    out.report.component_hv_calls += static_cast<long long>(n);
    full = full / static_cast<double>(n) + shift * snapshot - b;
    if (!full.allFinite()) throw NumericalBreakdown("solve_svrg: non-finite snapshot gradient");
    if (full.norm() <= tol) {
      out.report.early_exit = true;
      return finish(std::move(snapshot));
    }
    ++out.report.iterations;

    Vector x = snapshot;
    for (std::size_t t = 0; t < inner; ++t) {
      const std::size_t i = rng.index(n);
      // Linearity: H_i x - H_i snapshot = H_i (x - snapshot), one product.
      const Vector delta = x - snapshot;
      const Vector corr = base.apply_component(i, delta) + shift * delta;
      x -= step * (corr + full);
    }
    out.report.component_hv_calls += static_cast<long long>(inner);
    snapshot = std::move(x);
  }
  throw SolverBudgetExceeded("solve_svrg: " + std::to_string(epochs) + " epochs exhausted");
}

SolveResult solve_shifted(const ShiftedOperator& op, const Vector& b, double eps_rel,
                          SolverStrategy strategy, SeededRng& rng, const Vector* x0) {
  if (strategy == SolverStrategy::SVRG && op.has_components()) return solve_svrg(op, b, eps_rel, rng, -1, x0);
  return solve_agd(op, b, eps_rel, -1, x0);
}

}  // namespace fastcubic
