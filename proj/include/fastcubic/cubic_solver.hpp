#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fastcubic/cubic_model.hpp"
#include "fastcubic/linear_solver.hpp"

namespace fastcubic {

enum class Branch { Case1Direct, Case1Binary, Case2Eig };

std::string to_string(Branch b);

struct SolverConfig {
  double kappa = 1.0;
  // > 0 overrides the derived accuracy; otherwise the 1e4 * max{...}^20
  // formula is clamped into [eps_tilde_floor, eps_tilde_cap].
  double eps_tilde = -1.0;
  double eps_tilde_floor = 1e-10;
  double eps_tilde_cap = 1e-6;
  int max_outer_lambda_steps = -1;  // < 0: ceil(log_{4/3}(10 B kappa)) + 2
  SolverStrategy strategy = SolverStrategy::AGD;
  int power_iterations = -1;        // < 0: power_iteration_count(dim)
};

/// log10 of 1 / (1e4 * max{L, ||g||, 3 kappa / 10, B, 1}^20).
double theory_eps_tilde_log10(const CubicSubproblem& p, double kappa);
/// The accuracy actually used by fast_cubic_min.
double resolve_eps_tilde(const CubicSubproblem& p, const SolverConfig& cfg);
/// ceil(log_{4/3}(10 B kappa)) + 2.
int lambda_step_cap(double B, double kappa);
/// ceil(log2((lambda_hi - lambda_lo) / e)) + 1 with e = L eps_tilde c1 / (40 B),
/// c1 = min(3 / (10 kappa), 1).
long long binary_search_bound(double lambda_hi, double lambda_lo, double eps_tilde, double L, double B,
                              double kappa);

struct TraceRecord {
  int i = 0;
  double lambda = 0.0;
  double v_norm = 0.0;
  double delta = 0.0;      // NaN unless the eigenvector path ran
  std::string decision;    // case1, binary, shrink, eig, probe-hi, probe-lo
  double mu_lower = 0.0;   // certified gap bound handed to the linear solver
  long long hv_calls = 0;
  bool binary = false;     // produced inside binary_search
};

struct CubicSolution {
  double lambda = 0.0;
  Vector v;
  std::optional<Vector> v_min;
  Branch branch = Branch::Case1Direct;
  std::vector<TraceRecord> trace;
  long long hv_calls = 0;

  double B = 0.0;
  double eps_tilde = 0.0;
  double eps_tilde_theory_log10 = 0.0;
  double eps_hat = 0.0;
  int lambda_steps = 0;
  int binary_iterations = 0;
  long long binary_bound = 0;
};

/// Approximate minimizer data for the cubic model from Hessian-vector
/// products: starts at lambda_0 = 2B and lowers lambda until L||v|| meets
/// 2 lambda (Case 1) or the spectrum bottom is reached (Case 2). The stored
/// v approximates -(H + lambda I)^{-1} g, so it is a step candidate directly.
CubicSolution fast_cubic_min(const CubicSubproblem& p, const SolverConfig& cfg, SeededRng& rng);

/// Bisection on lambda in [lambda_lo, lambda_hi] until L||v|| is within
/// L eps_tilde of 2 lambda. `mu_lower` must satisfy
/// lambda_lo + lambda_min(H) >= mu_lower; a value <= 0 falls back to
/// max(lambda_lo - L2, 3 / (10 kappa)).
CubicSolution binary_search(const CubicSubproblem& p, double lambda_hi, double lambda_lo, double eps_tilde,
                            const SolverConfig& cfg, SeededRng& rng, double mu_lower = -1.0);

struct StepChoice {
  Vector h;
  double m = 0.0;
  bool from_eigvector = false;
};

/// argmin of m over {v, lambda v_min / (2L)}; one or two model evaluations.
StepChoice choose_step(const CubicSubproblem& p, const CubicSolution& sol);

}  // namespace fastcubic
