#pragma once

#include "fastcubic/linear_solver.hpp"
#include "fastcubic/oracles.hpp"

namespace fastcubic {

struct EigResult {
  Vector vector;            // unit norm
  double rayleigh = 0.0;    // through the relevant operator (see each function)
  long long hv_calls = 0;   // full-product equivalents spent, solver call site
  bool certified = false;
  int power_iterations = 0;
  int stages = 0;           // shift-and-invert stages (approx_min_eigvec only)
  double final_shift = 0.0; // approx_min_eigvec: sigma with sigma >= -lambda_min(H)
};

/// ceil(40 ln(d * 1e6)): power iterations for a 9/10 approximation with
/// failure probability 1e-6.
int power_iteration_count(std::size_t dim);

/// Leading eigenvector of (H + shift I)^{-1} by power iteration with inexact
/// solves. Each apply is accurate to `inner_eps` (absolute, unit input);
/// `inner_eps` <= 0 selects 1e-3 / L_upper, i.e. 0.1% of the smallest
/// possible lambda_max. `rayleigh` = w'z - inner_eps for the final apply z,
/// a lower bound on w'(H + shift I)^{-1}w.
EigResult inverse_power_leading(const ShiftedOperator& op, SeededRng& rng, double inner_eps = -1.0,
                                SolverStrategy strategy = SolverStrategy::AGD, int iterations = -1);

struct MinEigOptions {
  SolverStrategy strategy = SolverStrategy::AGD;
  int max_stages = -1;       // < 0: derived from L2 / tolerance
  int power_iterations = -1; // < 0: power_iteration_count(dim)
  // Known shift sigma with sigma + lambda_min(H) >= initial_gap_lower > 0;
  // a negative shift starts from sigma = 2 L2.
  double initial_shift = -1.0;
  double initial_gap_lower = 0.0;
};

/// Unit v with v'Hv <= lambda_min(H) + 1/(10 kappa), by shift-and-invert
/// power iteration on M = I - (H + L2 I)/(2 L2). A shift s > lambda_max(M)
/// corresponds to solving with H + sigma I, sigma = L2 (2s - 1); the gap
/// sigma + lambda_min(H) is roughly halved per stage until v'Hv + sigma <= 1/(10 kappa)
/// certifies the bound. When `g` is given the sign is chosen so g'v <= 0.
/// `rayleigh` is v'Hv.
EigResult approx_min_eigvec(const HvOperator& H, double L2, double kappa, SeededRng& rng,
                            const Vector* g = nullptr, MinEigOptions opts = {});

}  // namespace fastcubic
