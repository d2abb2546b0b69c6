#pragma once

#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fastcubic/oracles.hpp"

namespace fastcubic {

struct KnownOptimum {
  Vector point;
  double value = 0.0;
};

struct KnownSaddle {
  Vector point;
  double lambda_min = 0.0;  // smallest Hessian eigenvalue at the saddle
};

/// A concrete objective with analytic derivatives and smoothness constants
/// certified on the ball ||x|| <= domain_radius.
struct ProblemSpec {
  std::string name;
  std::size_t dim = 0;
  std::size_t n_components = 1;
  double domain_radius = std::numeric_limits<double>::infinity();
  std::map<std::string, double> generator_params;
  std::optional<KnownOptimum> known_optimum;
  std::optional<KnownSaddle> known_saddle;
  /// True when L and L2 were estimated by sampling rather than proved.
  bool constants_estimated = false;
  OracleSet oracle;
};

struct QuarticQuadraticOptions {
  double b_norm = 1.0;  // ||b||; 0 gives b = 0
  bool rotate = true;   // random orthogonal eigenbasis; false keeps A diagonal
};

/// f(x) = 1/2 x'Ax + b'x + (rho/4)||x||^4 with spectrum(A) = `spectrum`.
/// Constants on ||x|| <= R: L2 = max|spectrum| + 3 rho R^2, L = 6 rho R
/// (any positive L is valid when rho = 0; 1 is recorded then).
ProblemSpec make_quartic_quadratic(SeededRng& rng, std::size_t d, const std::vector<double>& spectrum,
                                   double rho, double R, QuarticQuadraticOptions opts = {});

/// f(x) = 1/2 (sum_{i<d} x_i^2 - gamma x_d^2) + 1/4 sum x_i^4. Strict saddle
/// at the origin, minima at (0, ..., 0, +-sqrt(gamma)).
ProblemSpec make_saddle_escape(double gamma, std::size_t d);

/// Sup norms of the second and third derivatives of phi(z) = 1/(1 + e^z).
/// Located by a 1-D grid over [-20, 20] (step 1e-3) refined with golden
/// section to 1e-14; the closed forms are 1/(6 sqrt 3) and 1/8.
inline constexpr double kSigmoidSecondDerivSup = 0.096225044864937627;
inline constexpr double kSigmoidThirdDerivSup = 0.125;

double sigmoid_loss(double z);         // phi(z)
double sigmoid_loss_d1(double z);      // phi'(z)
double sigmoid_loss_d2(double z);      // phi''(z)
double sigmoid_loss_d3(double z);      // phi'''(z)

/// f(x) = (1/n) sum_i phi(y_i a_i'x) with ||a_i|| <= data_scale, y_i = +-1.
ProblemSpec make_sigmoid_sum(SeededRng& rng, std::size_t d, std::size_t n, double data_scale);

/// Same objective with caller-supplied data (rows of `a` are the a_i).
ProblemSpec make_sigmoid_sum_from_data(const Matrix& a, const Vector& y, double data_scale);

struct MlpOptions {
  double target_scale = 1.0;  // 0 gives all-zero targets
  double radius = 3.0;        // ball on which constants are estimated
  std::size_t constant_samples = 24;
};

/// One-hidden-layer tanh regression, f = (1/n) sum_i (yhat_i - t_i)^2.
/// Parameters are laid out as [W1 (row-major, d_hidden x d_in), b1, w2, b2],
/// so d = d_hidden (d_in + 2) + 1. Hv uses the forward-over-reverse
/// R-operator. L and L2 are sampled and recorded with a 2x safety factor.
ProblemSpec make_mlp_regression(SeededRng& rng, std::size_t d_in, std::size_t d_hidden,
                                std::size_t n, MlpOptions opts = {});

/// Extended Rosenbrock, optimum at all-ones. Constants on ||x|| <= R by
/// Gershgorin: L2 = 1200R^2 + 1200R + 202, L = 2400R + 1200.
ProblemSpec make_rosenbrock(std::size_t d, double R = -1.0);

/// Largest |eigenvalue| of the Hessian at x via power iteration on Hv.
double estimate_hessian_norm(const OracleSet& oracle, const Vector& x, SeededRng& rng,
                             int iterations = 60);

}  // namespace fastcubic
