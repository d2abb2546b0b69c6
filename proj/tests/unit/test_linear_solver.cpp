#include <doctest.h>

#include <cmath>
#include <vector>

#include "dense_oracles.hpp"
#include "fastcubic/errors.hpp"
#include "fastcubic/linear_solver.hpp"
#include "fastcubic/problems.hpp"

using namespace fastcubic;

namespace {

ShiftedOperator dense_shifted(const Matrix& H, double shift) {
  const auto ev = fc_test::eigenvalues(H);
  return ShiftedOperator(HvOperator::from_matrix(H), shift, ev.minCoeff() + shift, ev.maxCoeff() + shift);
}

struct FiniteSum {
  std::vector<Matrix> parts;
  Matrix mean;
};

FiniteSum random_finite_sum(SeededRng& rng, Eigen::Index d, std::size_t n) {
  FiniteSum fs;
  fs.mean = Matrix::Zero(d, d);
  for (std::size_t i = 0; i < n; ++i) {
    fs.parts.push_back(fc_test::random_symmetric(rng, d, -1.0, 1.0));
    fs.mean += fs.parts.back();
  }
  fs.mean /= static_cast<double>(n);
  return fs;
}

// Components are tallied like a real finite-sum oracle; L_upper bounds every
// shifted component so plain SVRG steps are stable.
ShiftedOperator finite_sum_shifted(const FiniteSum& fs, double shift) {
  const Matrix mean = fs.mean;
  const std::vector<Matrix> parts = fs.parts;
  HvOperator base(static_cast<std::size_t>(mean.rows()), [mean](const Vector& v) -> Vector { return mean * v; },
                  parts.size(), [parts](std::size_t i, const Vector& v) -> Vector { return parts[i] * v; });
  double comp = 0.0;
  for (const Matrix& P : parts) comp = std::max(comp, fc_test::eigenvalues(P).cwiseAbs().maxCoeff());
  const double mu = fc_test::lambda_min(mean) + shift;
  return ShiftedOperator(base, shift, mu, std::max(comp + shift, mu));
}

}  // namespace

TEST_CASE("agd: diagonal solve") {
  const Matrix H = Vector{{1.0, 2.0}}.asDiagonal();
  const ShiftedOperator op(HvOperator::from_matrix(H), 1.0, 2.0, 3.0);
  const SolveResult r = solve_agd(op, Vector{{1.0, 1.0}}, 1e-8);
  CHECK((r.x - Vector{{0.5, 1.0 / 3.0}}).norm() <= 1e-8 * std::sqrt(2.0));
  CHECK(r.report.hv_calls >= r.report.iterations);
  CHECK(r.report.strategy == SolverStrategy::AGD);
}

TEST_CASE("agd: zero right-hand side") {
  const ShiftedOperator op(HvOperator::from_matrix(Matrix::Identity(3, 3)), 0.0, 1.0, 1.0);
  const SolveResult r = solve_agd(op, Vector::Zero(3), 1e-6);
  CHECK(r.x.isZero(0.0));
  CHECK(r.report.iterations == 0);
}

TEST_CASE("agd: random 20x20 against a dense factorization") {
  SeededRng rng(21);
  for (int k = 0; k < 20; ++k) {
    const Matrix H = fc_test::random_symmetric(rng, 20, -1.0, 1.0);
    const double shift = -fc_test::lambda_min(H) + 0.05 + rng.uniform();
    const Vector b = gaussian_vector(rng, 20);
    for (double eps : {1e-3, 1e-8}) {
      const SolveResult r = solve_agd(dense_shifted(H, shift), b, eps);
      CHECK((r.x - fc_test::direct_solve(H, shift, b)).norm() <= eps * b.norm());
    }
  }
}

TEST_CASE("agd: argument and budget errors") {
  const ShiftedOperator op(HvOperator::from_matrix(Matrix::Identity(2, 2)), 0.0, 1.0, 1.0);
  CHECK_THROWS_AS(solve_agd(op, Vector::Ones(2), 0.0), InvalidArgument);
  CHECK_THROWS_AS(solve_agd(op, Vector::Ones(2), 1.0), InvalidArgument);
  CHECK_THROWS_AS(solve_agd(op, Vector::Ones(3), 0.1), DimensionMismatch);
  CHECK_THROWS_AS(ShiftedOperator(HvOperator::from_matrix(Matrix::Identity(2, 2)), 0.0, 0.0, 1.0), InvalidArgument);
  // A badly conditioned system with a one-step budget cannot finish.
  const Matrix H = Vector{{1e-3, 1.0}}.asDiagonal();
  const ShiftedOperator ill(HvOperator::from_matrix(H), 0.0, 1e-3, 1.0);
  CHECK_THROWS_AS(solve_agd(ill, Vector::Ones(2), 1e-8, 1), SolverBudgetExceeded);
}

TEST_CASE("agd: warm start with a large residual is ignored") {
  SeededRng rng(22);
  const Matrix H = fc_test::random_symmetric(rng, 8, 0.5, 2.0);
  const ShiftedOperator op = dense_shifted(H, 0.0);
  const Vector b = gaussian_vector(rng, 8);
  const Vector bad = 1e6 * Vector::Ones(8);
  const SolveResult r = solve_agd(op, b, 1e-9, -1, &bad);
  CHECK((r.x - fc_test::direct_solve(H, 0.0, b)).norm() <= 1e-9 * b.norm());
  const Vector good = fc_test::direct_solve(H, 0.0, b);
  const SolveResult w = solve_agd(op, b, 1e-9, -1, &good);
  CHECK(w.report.iterations <= 1);
}

TEST_CASE("agd: iteration count scales like sqrt(kappa)") {
  std::vector<double> lk, li;
  SeededRng rng(23);
  const Vector b = gaussian_vector(rng, 200);
  for (double kappa : {10.0, 1e2, 1e3, 1e4}) {
    Vector s(200);
    for (int i = 0; i < 200; ++i) s[i] = 1.0 + (kappa - 1.0) * i / 199.0;
    const ShiftedOperator op(HvOperator::from_matrix(s.asDiagonal()), 0.0, 1.0, kappa);
    const SolveResult r = solve_agd(op, b, 1e-8);
    CHECK((r.x - b.cwiseQuotient(s)).norm() <= 1e-8 * b.norm());
    lk.push_back(std::log(kappa));
    li.push_back(std::log(static_cast<double>(r.report.iterations)));
  }
  const double mx = (lk[0] + lk[1] + lk[2] + lk[3]) / 4, my = (li[0] + li[1] + li[2] + li[3]) / 4;
  double num = 0, den = 0;
  for (int i = 0; i < 4; ++i) {
    num += (lk[i] - mx) * (li[i] - my);
    den += (lk[i] - mx) * (lk[i] - mx);
  }
  const double slope = num / den;
  CHECK(slope >= 0.4);
  CHECK(slope <= 0.6);
}

TEST_CASE("agd iteration bound formula") {
  // k = 100, mu = 1, eps = 1e-6: 2 * 10 * ln(sqrt(101) * 1e6) + 1.
  const double expected = std::ceil(20.0 * std::log(std::sqrt(101.0) / 1e-6)) + 1;
  CHECK(agd_iteration_bound(100.0, 1.0, 1e-6) == static_cast<long long>(expected));
  CHECK(agd_iteration_bound(100.0, 0.5, 1e-6) > agd_iteration_bound(100.0, 1.0, 1e-6));
}

TEST_CASE("svrg: single component agrees with agd") {
  SeededRng rng(24);
  const FiniteSum fs = random_finite_sum(rng, 6, 1);
  const double shift = -fc_test::lambda_min(fs.mean) + 0.3;
  const ShiftedOperator op = finite_sum_shifted(fs, shift);
  const Vector b = gaussian_vector(rng, 6);
  const double eps = 1e-6;
  const SolveResult s = solve_svrg(op, b, eps, rng);
  const SolveResult a = solve_agd(op, b, eps);
  CHECK((s.x - a.x).norm() <= 2 * eps * b.norm());
  CHECK(s.report.strategy == SolverStrategy::SVRG);
}

TEST_CASE("svrg: sigmoid sum at shift L2 against a dense factorization") {
  SeededRng rng(25);
  const ProblemSpec spec = make_sigmoid_sum(rng, 10, 50, 1.0);
  const OracleSet& o = spec.oracle;
  const Vector x = gaussian_vector(rng, 10);
  const HvOperator H = HvOperator::at(o, x);
  const Matrix Hd = H.materialize();
  const double shift = o.params.L2;
  // Each component Hessian is bounded by L2, so 2 L2 bounds every shifted component.
  const ShiftedOperator op(H, shift, fc_test::lambda_min(Hd) + shift, 2 * o.params.L2);
  const Vector b = gaussian_vector(rng, 10);
  for (double eps : {1e-4, 1e-8}) {
    const SolveResult r = solve_svrg(op, b, eps, rng);
    CHECK((r.x - fc_test::direct_solve(Hd, shift, b)).norm() <= eps * b.norm());
  }
}

TEST_CASE("svrg: same seed gives identical output") {
  SeededRng gen(26);
  const FiniteSum fs = random_finite_sum(gen, 5, 7);
  const ShiftedOperator op = finite_sum_shifted(fs, -fc_test::lambda_min(fs.mean) + 0.2);
  const Vector b = gaussian_vector(gen, 5);
  SeededRng r1(99), r2(99);
  const SolveResult a = solve_svrg(op, b, 1e-7, r1);
  const SolveResult c = solve_svrg(op, b, 1e-7, r2);
  CHECK(a.x == c.x);
  CHECK(a.report.component_hv_calls == c.report.component_hv_calls);
  CHECK_THROWS_AS(solve_svrg(dense_shifted(Matrix::Identity(2, 2), 0.0), Vector::Ones(2), 0.1, r1), InvalidArgument);
  CHECK_THROWS_AS(solve_svrg(op, b, 1e-12, r1, 1), SolverBudgetExceeded);
}

TEST_CASE("residual contract across both strategies") {
  SeededRng rng(27);
  for (int k = 0; k < 100; ++k) {
    const auto d = static_cast<Eigen::Index>(2 + rng.index(15));
    const FiniteSum fs = random_finite_sum(rng, d, 1 + rng.index(12));
    const double shift = -fc_test::lambda_min(fs.mean) + std::pow(10.0, -2.0 + 2.0 * rng.uniform());
    const ShiftedOperator op = finite_sum_shifted(fs, shift);
    const Vector b = gaussian_vector(rng, d);
    const double eps = std::pow(10.0, -9.0 + 6.0 * rng.uniform());
    const Vector exact = fc_test::direct_solve(fs.mean, shift, b);
    for (SolverStrategy st : {SolverStrategy::AGD, SolverStrategy::SVRG}) {
      const SolveResult r = solve_shifted(op, b, eps, st, rng);
      CHECK((r.x - exact).norm() <= r.report.residual_bound * b.norm());
    }
  }
}

TEST_CASE("strategy names") {
  CHECK(solver_strategy_from_string("agd") == SolverStrategy::AGD);
  CHECK(solver_strategy_from_string("svrg") == SolverStrategy::SVRG);
  CHECK(to_string(SolverStrategy::SVRG) == "svrg");
  CHECK_THROWS_AS(solver_strategy_from_string("cg"), ConfigError);
}
