#include "fastcubic/cubic_model.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <utility>

#include "fastcubic/errors.hpp"

namespace fastcubic {

CubicSubproblem CubicSubproblem::from_dense(Vector g, Matrix H, double L, double L2,
                                            std::shared_ptr<HvCounter> counter) {
  if (H.rows() != g.size() || H.cols() != g.size()) throw DimensionMismatch("from_dense: H and g disagree");
  CubicSubproblem p;
  p.g = std::move(g);
  p.h_op = HvOperator::from_matrix(std::move(H), std::move(counter));
  p.L = L;
  p.L2 = L2;
  return p;
}

CubicSubproblem CubicSubproblem::at(const OracleSet& oracle, const Vector& x,
                                    std::shared_ptr<HvCounter> counter) {
  CubicSubproblem p;
  p.g = oracle.gradient(x);
  require_finite(p.g, "gradient");
  p.h_op = HvOperator::at(oracle, x, std::move(counter));
  p.L = oracle.params.L;
  p.L2 = oracle.params.L2;
  return p;
}

double eval_m(const CubicSubproblem& p, const Vector& h) {
  if (h.size() != p.g.size()) throw DimensionMismatch("eval_m: step dimension");
  const double n = h.norm();
  return p.g.dot(h) + 0.5 * h.dot(p.h_op.apply(h)) + p.L / 6.0 * n * n * n;
}

Vector grad_m(const CubicSubproblem& p, const Vector& h) {
  if (h.size() != p.g.size()) throw DimensionMismatch("grad_m: step dimension");
  return p.g + p.h_op.apply(h) + 0.5 * p.L * h.norm() * h;
}

double crude_lambda_bound(const CubicSubproblem& p, double kappa) {
  return p.L2 + std::sqrt(p.L * p.g.norm()) + 1.0 / kappa;
}

double characterization_lambda_bound(const CubicSubproblem& p) {
  return std::max(2.0 * p.L2 + std::sqrt(p.L * p.g.norm()), 1.0);
}

double cubic_value_formula(const Vector& g, const Matrix& H, double lambda, double L) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(H);
  const Vector gt = es.eigenvectors().transpose() * g;
  const Vector& lam = es.eigenvalues();
  const double scale = std::max(1.0, lam.cwiseAbs().maxCoeff() + std::abs(lambda));
  double quad = 0.0;
  for (Eigen::Index j = 0; j < lam.size(); ++j) {
    const double s = lam[j] + lambda;
    if (s > 1e-13 * scale) quad += gt[j] * gt[j] / s;
  }
  return -0.5 * quad - 2.0 * lambda * lambda * lambda / (3.0 * L * L);
}

ExactSolution exact_solve_dense(const Vector& g, const Matrix& H, double L, double tol) {
  if (!(tol > 0.0)) throw InvalidArgument("exact_solve: tol must be positive");
  if (!(L > 0.0)) throw InvalidArgument("exact_solve: L must be positive");
  if (H.rows() != g.size() || H.cols() != g.size()) throw DimensionMismatch("exact_solve: H and g disagree");

  Eigen::SelfAdjointEigenSolver<Matrix> es(H);
  const Vector& lam = es.eigenvalues();
  const Matrix& Q = es.eigenvectors();
  const Vector gt = Q.transpose() * g;
  const Eigen::Index d = lam.size();
  const double lmin = lam[0];
  const double gnorm = g.norm();
  const double ell = std::max(0.0, -lmin);
  const double spread = std::max(1.0, lam.cwiseAbs().maxCoeff());

  // Bottom eigenspace: eigenvalues indistinguishable from lambda_min.
  Eigen::Index bottom = 1;
  while (bottom < d && lam[bottom] - lmin <= 1e-10 * spread) ++bottom;
  const double mass = gt.head(bottom).norm();

  // Denominators lam[j] + lambda are formed as base[j] + s with lambda = ell + s,
  // so the gap above the spectrum edge keeps full relative precision.
  Vector base = lam;
  if (ell > 0.0) base.array() -= lmin;
  auto step_norm = [&](double s, Eigen::Index first) {
    double acc = 0.0;
    for (Eigen::Index j = first; j < d; ++j) {
      const double c = gt[j] / (base[j] + s);
      acc += c * c;
    }
    return std::sqrt(acc);
  };
  auto secular = [&](double s, Eigen::Index first) { return 2.0 * (ell + s) / L - step_norm(s, first); };

  ExactSolution sol;
  sol.H = H;
  sol.lambda_min = lmin;
  sol.v_min = Q.col(0);
  if (g.dot(sol.v_min) > 0.0) sol.v_min = -sol.v_min;

  Vector coeff = Vector::Zero(d);
  if (gnorm == 0.0 && lmin >= 0.0) {
    sol.lambda_star = 0.0;
  } else if (ell > 0.0 && mass <= tol * gnorm && secular(0.0, bottom) >= 0.0) {
    // Hard case: lambda* = -lambda_min, step completed along the bottom eigenvector.
    sol.hard_case = true;
    sol.lambda_star = ell;
    for (Eigen::Index j = bottom; j < d; ++j) coeff[j] = -gt[j] / base[j];
    const double target = 2.0 * ell / L;
    const double rest = coeff.norm();
    const double gamma = std::sqrt(std::max(0.0, target * target - rest * rest));
    // coefficient along Q.col(0), oriented so g'v_min <= 0
    coeff[0] = (g.dot(Q.col(0)) > 0.0 ? -gamma : gamma);
  } else {
    if (ell > 0.0 && mass > tol * gnorm && secular(tol, 0) >= 0.0 && mass <= 1e3 * tol * gnorm) {
      throw InconsistentInstance("exact_solve: hard case with bottom-eigenspace gradient mass " +
                                 std::to_string(mass));
    }
    double lo = 0.0;
    double hi = std::max(2.0 * (2.0 * spread + std::sqrt(L * gnorm)), 1.0);
    while (secular(hi, 0) <= 0.0) hi *= 2.0;
    double s = 0.5 * (lo + hi);
    for (int it = 0; it < 2000; ++it) {
      s = 0.5 * (lo + hi);
      if (s <= lo || s >= hi) break;
      const double pv = secular(s, 0);
      if (std::abs(pv) <= tol * std::max(1.0, 2.0 * (ell + s) / L)) break;
      (pv < 0.0 ? lo : hi) = s;
    }
    sol.lambda_star = ell + s;
    for (Eigen::Index j = 0; j < d; ++j) coeff[j] = -gt[j] / (base[j] + s);
  }

  sol.h_star = Q * coeff;
  const double hn = sol.h_star.norm();
  sol.m_star = g.dot(sol.h_star) + 0.5 * sol.h_star.dot(H * sol.h_star) + L / 6.0 * hn * hn * hn;
  return sol;
}

ExactSolution exact_solve(const CubicSubproblem& p, double tol) {
  const Matrix H = p.h_op.with_site(CallSite::Verification).materialize();
  return exact_solve_dense(p.g, H, p.L, tol);
}

Certificate check_certificate(const OracleSet& oracle, const Vector& x, double eps,
                              std::shared_ptr<HvCounter> counter) {
  if (oracle.dim > 200) throw InvalidArgument("check_certificate: dense path needs dim <= 200");
  Certificate c;
  c.eps = eps;
  c.L = oracle.params.L;
  c.grad_norm = oracle.gradient(x).norm();
  const Matrix H = HvOperator::at(oracle, x, std::move(counter), CallSite::Verification).materialize();
  c.lambda_min_hessian = dense_lambda_min(H);
  c.passed = c.grad_norm <= eps && c.lambda_min_hessian >= -std::sqrt(c.L * eps);
  return c;
}

StepBounds evaluate_step_bounds(const OracleSet& oracle, const Vector& x, const CubicSubproblem& p,
                                const Vector& h_prime, const ExactSolution& exact) {
  constexpr double kSlack = 1e-8;
  StepBounds s;
  const Vector y = x + h_prime;
  const double hn = h_prime.norm();
  s.grad_norm = oracle.gradient(y).norm();
  s.grad_bound = p.L * hn * hn + grad_m(p, h_prime).norm();
  s.lambda_min = dense_lambda_min(HvOperator::at(oracle, y, nullptr, CallSite::Verification).materialize());
  s.lambda_bound = -std::cbrt(1.5 * p.L * p.L * std::max(0.0, -exact.m_star)) - p.L * hn;
  s.passed = (s.grad_bound - s.grad_norm >= -kSlack) && (s.lambda_min - s.lambda_bound >= -kSlack);
  return s;
}

bool check_step_bounds(const OracleSet& oracle, const Vector& x, const CubicSubproblem& p,
                       const Vector& h_prime, const ExactSolution& exact) {
  return evaluate_step_bounds(oracle, x, p, h_prime, exact).passed;
}

}  // namespace fastcubic
