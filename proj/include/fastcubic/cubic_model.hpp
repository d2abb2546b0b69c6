#pragma once

#include <memory>

#include "fastcubic/oracles.hpp"

namespace fastcubic {

/// m(h) = g'h + 1/2 h'Hh + (L/6)||h||^3 with H available through products.
struct CubicSubproblem {
  Vector g;
  HvOperator h_op;
  double L = 1.0;
  double L2 = 1.0;

  std::size_t dim() const { return static_cast<std::size_t>(g.size()); }

  static CubicSubproblem from_dense(Vector g, Matrix H, double L, double L2,
                                    std::shared_ptr<HvCounter> counter = nullptr);
  /// Model of `oracle` at x: one gradient call, Hessian products on demand.
  static CubicSubproblem at(const OracleSet& oracle, const Vector& x,
                            std::shared_ptr<HvCounter> counter = nullptr);
};

/// Exactly one Hessian product.
double eval_m(const CubicSubproblem& p, const Vector& h);
/// g + Hh + (L/2)||h|| h.
Vector grad_m(const CubicSubproblem& p, const Vector& h);

/// L2 + sqrt(L ||g||) + 1/kappa, the solver's starting bound (lambda_0 = 2B).
double crude_lambda_bound(const CubicSubproblem& p, double kappa);
/// max{2 L2 + sqrt(L ||g||), 1}, the characterization's bound on lambda*.
double characterization_lambda_bound(const CubicSubproblem& p);

struct ExactSolution {
  double lambda_star = 0.0;
  Vector h_star;
  double m_star = 0.0;
  bool hard_case = false;
  // Dense by-products kept for verification.
  double lambda_min = 0.0;
  Vector v_min;
  Matrix H;
};

/// Global minimizer of m by dense eigendecomposition and bisection on the
/// secular function p(lambda) = 2 lambda / L - ||(H + lambda I)^{-1} g||.
/// Hessian products are tallied under CallSite::Verification.
ExactSolution exact_solve(const CubicSubproblem& p, double tol = 1e-12);
ExactSolution exact_solve_dense(const Vector& g, const Matrix& H, double L, double tol = 1e-12);

/// -1/2 g'(H + lambda I)^+ g - 2 lambda^3 / (3 L^2), the optimal value as a
/// function of lambda*.
double cubic_value_formula(const Vector& g, const Matrix& H, double lambda, double L);

struct Certificate {
  double grad_norm = 0.0;
  double lambda_min_hessian = 0.0;
  double eps = 0.0;
  double L = 0.0;
  bool passed = false;
};

/// ||grad f(x)|| <= eps and lambda_min(hess f(x)) >= -sqrt(L eps), checked
/// with a dense eigensolve (dim <= 200). Products go to CallSite::Verification.
Certificate check_certificate(const OracleSet& oracle, const Vector& x, double eps,
                              std::shared_ptr<HvCounter> counter = nullptr);

struct StepBounds {
  double grad_norm = 0.0;      // ||grad f(x + h')||
  double grad_bound = 0.0;     // L||h'||^2 + ||grad m(h')||
  double lambda_min = 0.0;     // lambda_min(hess f(x + h'))
  double lambda_bound = 0.0;   // -(3 L^2 max{0, -m*} / 2)^{1/3} - L||h'||
  bool passed = false;
};

/// Evaluates both step bounds at x + h' against direct oracle measurements,
/// with slack 1e-8.
StepBounds evaluate_step_bounds(const OracleSet& oracle, const Vector& x, const CubicSubproblem& p,
                                const Vector& h_prime, const ExactSolution& exact);
bool check_step_bounds(const OracleSet& oracle, const Vector& x, const CubicSubproblem& p,
                       const Vector& h_prime, const ExactSolution& exact);

}  // namespace fastcubic
