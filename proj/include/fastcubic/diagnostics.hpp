#pragma once

#include <string>
#include <vector>

#include "fastcubic/cubic_model.hpp"
#include "fastcubic/cubic_solver.hpp"

namespace fastcubic {

enum class InstanceKind { Easy, Hard, NearHard, ZeroGradient, Convex };

std::string to_string(InstanceKind k);

struct DenseInstance {
  Vector g;
  Matrix H;
  double L = 1.0;
  double L2 = 1.0;
  InstanceKind kind = InstanceKind::Easy;

  CubicSubproblem subproblem(std::shared_ptr<HvCounter> counter = nullptr) const {
    return CubicSubproblem::from_dense(g, H, L, L2, std::move(counter));
  }
};

/// Random dense cubic subproblem. H = Q diag(spectrum) Q' with Q Haar
/// distributed and spectrum in [-L2, L2]; the gradient scale is log-uniform
/// in [1e-4, 1]. Hard instances remove the gradient's bottom-eigenvector
/// component, near-hard ones shrink it to 1e-6 of ||g||.
DenseInstance random_instance(SeededRng& rng, std::size_t d, InstanceKind kind);

/// Instance whose optimal model value lies in [-threshold, 0], built by
/// shrinking g and keeping lambda_min(H) above -(3 L^2 threshold / 2)^{1/3} / 2.
DenseInstance near_optimal_instance(SeededRng& rng, std::size_t d, double threshold);

struct ScheduleViolation {
  int i = 0;
  std::string what;
};

struct ScheduleReport {
  std::vector<ScheduleViolation> violations;
  int main_steps = 0;
  int eig_steps = 0;
  bool ok() const { return violations.empty(); }
};

/// Checks the lambda schedule of one fast_cubic_min run against the dense
/// spectrum: range, gap floor 3/(10 kappa), 3/4 contraction, exit gap
/// 1/kappa and the sandwich gap/2 <= Delta <= 5 gap/8.
ScheduleReport check_schedule(const CubicSolution& sol, double lambda_min, double lambda_max, double kappa,
                              double tol = 1e-9);

}  // namespace fastcubic
