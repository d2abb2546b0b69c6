#include "fastcubic/eigen_approx.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fastcubic/errors.hpp"

namespace fastcubic {

int power_iteration_count(std::size_t dim) {
  return static_cast<int>(std::ceil(40.0 * std::log(static_cast<double>(dim) * 1e6)));
}

EigResult inverse_power_leading(const ShiftedOperator& op, SeededRng& rng, double inner_eps,
                                SolverStrategy strategy, int iterations) {
  if (inner_eps <= 0.0) inner_eps = 1e-3 / op.L_upper();
  inner_eps = std::min(inner_eps, 0.5);
  const int K = iterations > 0 ? iterations : power_iteration_count(op.dim());

  EigResult out;
  Vector w = gaussian_unit_vector(rng, op.dim());
  SolveResult z;
  for (int k = 0; k <= K; ++k) {
    // The previous solve approximates (H + shift I)^{-1} w for the new w once
    // the iteration settles, so it is a natural warm start.
    const Vector prev = z.x;
    z = solve_shifted(op, w, inner_eps, strategy, rng, k > 0 ? &prev : nullptr);
    out.hv_calls += z.report.hv_calls;
    if (k == K) break;
    const double zn = z.x.norm();
    if (!(zn > 0.0) || !std::isfinite(zn)) throw NumericalBreakdown("inverse_power_leading: degenerate iterate");
    w = z.x / zn;
    ++out.power_iterations;
  }
  out.rayleigh = w.dot(z.x) - inner_eps;
  out.vector = std::move(w);
  out.certified = true;
  return out;
}

EigResult approx_min_eigvec(const HvOperator& H, double L2, double kappa, SeededRng& rng, const Vector* g,
                            MinEigOptions opts) {
  if (!(kappa > 0.0)) throw InvalidArgument("approx_min_eigvec: kappa must be positive");
  if (!(L2 > 0.0)) throw InvalidArgument("approx_min_eigvec: L2 must be positive");
  const double tol = 1.0 / (10.0 * kappa);

  // sigma = 2 L2 is s = 3/2 for M; the gap sigma + lambda_min(H) is >= L2.
  double sigma = 2.0 * L2;
  double mu = L2;
  if (opts.initial_shift >= 0.0) {
    if (!(opts.initial_gap_lower > 0.0)) throw InvalidArgument("approx_min_eigvec: initial shift needs a gap bound");
    sigma = opts.initial_shift;
    mu = opts.initial_gap_lower;
  }
  const int max_stages = opts.max_stages > 0
                             ? opts.max_stages
                             : static_cast<int>(std::ceil(std::log(4.0 * L2 / tol) / std::log(1.0 / 0.55))) + 8;

  EigResult out;
  for (int stage = 0; stage < max_stages; ++stage) {
    const ShiftedOperator op(H, sigma, mu, sigma + L2);
    const double inner_eps = 1e-3 / op.L_upper();
    EigResult lead = inverse_power_leading(op, rng, inner_eps, opts.strategy, opts.power_iterations);
    out.hv_calls += lead.hv_calls;
    out.power_iterations += lead.power_iterations;
    out.stages = stage + 1;

    const Vector& w = lead.vector;
    const double q = w.dot(H.apply(w));
    ++out.hv_calls;
    if (q + sigma <= tol) {
      // sigma >= -lambda_min(H) by construction, so q - lambda_min <= q + sigma.
      out.vector = w;
      out.rayleigh = q;
      out.certified = true;
      out.final_shift = sigma;
      if (g != nullptr && g->dot(out.vector) > 0.0) out.vector = -out.vector;
      return out;
    }

    const double rho = lead.rayleigh;
    if (!(rho > 0.0)) throw NumericalBreakdown("approx_min_eigvec: non-positive Rayleigh estimate");
    const double rho_hi = rho + 2.0 * inner_eps;
    // gap <= 1/rho always; gap >= 0.9/rho_hi when w is a 9/10 eigenvector.
    if (1.0 / rho > 0.5 * tol) {
      const double step = 0.45 / rho_hi;
      sigma -= step;
      mu = 0.45 / rho_hi;
    }
  }
  throw EigBudgetExceeded("approx_min_eigvec: certificate not reached in " + std::to_string(max_stages) +
                          " stages");
}

}  // namespace fastcubic
