#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "fastcubic/cubic_model.hpp"
#include "fastcubic/cubic_solver.hpp"

namespace fastcubic {

enum class RunStatus { Converged, MaxOuterReached, LeftCertifiedBall, Error };

std::string to_string(RunStatus s);

struct FastCubicConfig {
  double eps = 1e-3;
  double c_const = 2.4e6;  // stopping constant; 100 in practical mode
  int max_outer = 10000;
  SolverStrategy strategy = SolverStrategy::AGD;
  std::uint64_t seed = 0;
  // Radius of the ball on which the oracle constants are certified.
  double domain_radius = std::numeric_limits<double>::infinity();
  // Attach a dense certificate at termination when dim <= 200.
  bool certify = true;
  // Passed through to the subproblem solver (kappa is always derived from eps).
  double eps_tilde_floor = 1e-10;
  int power_iterations = -1;

  void validate() const;
};

struct IterationRecord {
  int iter = 0;
  double f = 0.0;
  double grad_norm = 0.0;
  double m = 0.0;             // model value of the accepted step (NaN for gd)
  std::string branch;         // solver branch, "exact", or "gd"
  double lambda = 0.0;
  long long inner_hv = 0;
  long long cum_hv = 0;
  long long cum_grad = 0;
};

struct RunReport {
  std::string method;
  std::vector<IterationRecord> iterations;
  RunStatus status = RunStatus::Error;
  bool converged = false;      // stopping rule met (independent of ball exits)
  bool left_ball = false;
  std::optional<Certificate> certificate;
  int outer_iters = 0;
  long long hv_calls = 0;      // solver call site only
  long long grad_calls = 0;
  long long verification_hv_calls = 0;
  double f0 = 0.0;
  double final_f = 0.0;
  double final_grad_norm = 0.0;
  std::optional<double> final_lambda_min;
  double observed_decrease = 0.0;  // f(x0) - final f, stands in for f(x0) - f*
  double wall_ms = 0.0;
  std::string error;
};

struct RunResult {
  Vector x;
  RunReport report;
};

/// kappa = sqrt(900 / (eps L)).
double kappa_for(double eps, double L);
/// -eps^{3/2} / (c sqrt(L)).
double stopping_threshold(double eps, double L, double c_const);

/// Cubic-regularized Newton steps with the Hv-only subproblem solver. Stops
/// when the accepted step's model decrease is smaller than the threshold and
/// returns the point after that step.
RunResult fast_cubic(const OracleSet& oracle, const Vector& x0, const FastCubicConfig& cfg);

/// Same outer loop with each subproblem solved exactly by dense
/// eigendecomposition (dim <= 200).
RunResult exact_np_cubic(const OracleSet& oracle, const Vector& x0, const FastCubicConfig& cfg);

/// Fixed step 1/L2 until ||grad f|| <= eps or max_iter steps. Records the
/// first 100 iterations and then every `record_every`-th one.
RunResult gradient_descent(const OracleSet& oracle, const Vector& x0, double eps, long long max_iter,
                           double domain_radius = std::numeric_limits<double>::infinity(),
                           long long record_every = 100);

}  // namespace fastcubic
