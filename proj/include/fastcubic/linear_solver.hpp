#pragma once

#include <string>

#include "fastcubic/oracles.hpp"

namespace fastcubic {

/// (H + shift * I) accessed through Hessian-vector products, together with
/// certified bounds mu_lower <= lambda_min(H) + shift and
/// lambda_max(H) + shift <= L_upper.
class ShiftedOperator {
 public:
  ShiftedOperator(HvOperator base, double shift, double mu_lower, double L_upper);

  std::size_t dim() const { return base_.dim(); }
  std::size_t n_components() const { return base_.n_components(); }
  bool has_components() const { return base_.has_components(); }
  double shift() const { return shift_; }
  double mu_lower() const { return mu_lower_; }
  double L_upper() const { return L_upper_; }
  /// L_upper / mu_lower.
  double condition_bound() const { return L_upper_ / mu_lower_; }
  const HvOperator& base() const { return base_; }

  Vector apply(const Vector& v) const;
  /// (H_i + shift * I) v for a finite-sum base.
  Vector apply_component(std::size_t i, const Vector& v) const;

 private:
  HvOperator base_;
  double shift_;
  double mu_lower_;
  double L_upper_;
};

enum class SolverStrategy { AGD, SVRG };

std::string to_string(SolverStrategy s);
SolverStrategy solver_strategy_from_string(const std::string& s);

struct SolveReport {
  long long iterations = 0;          // AGD steps, or SVRG epochs
  long long hv_calls = 0;            // full products (SVRG: ceil(component / n))
  long long component_hv_calls = 0;  // SVRG only
  double residual_bound = 0.0;       // ||x - (H + shift I)^{-1} b|| <= residual_bound * ||b||
  SolverStrategy strategy = SolverStrategy::AGD;
  bool early_exit = false;           // stopped on the computable residual test
};

struct SolveResult {
  Vector x;
  SolveReport report;
};

/// Iterations after which constant-momentum Nesterov descent on
/// 1/2 x'Ax - b'x, started at 0, is within eps_rel * ||b|| of the solution:
///   N = ceil(2 sqrt(k) ln(sqrt(k + 1) max(1, 1/mu) / eps_rel)) + 1,
/// from f(x_N) - f* <= (1 - 1/sqrt(k))^N (L + mu)/2 ||x*||^2 and ||x*|| <= ||b|| / mu.
long long agd_iteration_bound(double kappa_op, double mu_lower, double eps_rel);

/// Accelerated gradient descent with step 1/L_upper and momentum
/// (sqrt(k) - 1)/(sqrt(k) + 1). Exits early once ||A y - b|| <= eps_rel * mu_lower * ||b||.
/// `max_iter` < 0 means "use the a-priori bound". A warm start `x0` is used
/// only when its residual is below ||b||, which keeps the a-priori bound valid.
SolveResult solve_agd(const ShiftedOperator& op, const Vector& b, double eps_rel, long long max_iter = -1,
                      const Vector* x0 = nullptr);

/// Default epoch budget for solve_svrg.
long long svrg_epoch_budget(const ShiftedOperator& op, double eps_rel);

/// Plain SVRG on the finite-sum quadratic: epochs of m = 2n steps of size
/// 1/(3 L_upper), snapshot gradient from n component products. Exits when the
/// snapshot gradient certifies the residual contract.
SolveResult solve_svrg(const ShiftedOperator& op, const Vector& b, double eps_rel, SeededRng& rng,
                       long long max_epochs = -1, const Vector* x0 = nullptr);

/// Dispatches on `strategy`. A zero right-hand side returns zero immediately.
SolveResult solve_shifted(const ShiftedOperator& op, const Vector& b, double eps_rel,
                          SolverStrategy strategy, SeededRng& rng, const Vector* x0 = nullptr);

}  // namespace fastcubic
