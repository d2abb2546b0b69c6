#include <doctest.h>

#include <cmath>

#include "dense_oracles.hpp"
#include "fastcubic/errors.hpp"
#include "fastcubic/problems.hpp"
#include "problem_suite.hpp"

using namespace fastcubic;

TEST_CASE("quartic_quadratic: pure quadratic saddle") {
  SeededRng rng(1);
  const ProblemSpec s = make_quartic_quadratic(rng, 2, {1.0, -1.0}, 0.0, 1.0, {.b_norm = 0.0, .rotate = false});
  const Vector x = Vector::Zero(2);
  CHECK(s.oracle.gradient(x).norm() == 0.0);
  const Matrix H = fc_test::numeric_hessian(s.oracle, x);
  CHECK(H.isApprox(Vector{{1.0, -1.0}}.asDiagonal().toDenseMatrix(), 1e-9));
  CHECK(s.oracle.hess_vec(x, Vector::Unit(2, 1)).isApprox(Vector{{0.0, -1.0}}));
}

TEST_CASE("quartic_quadratic: one-dimensional quartic") {
  SeededRng rng(2);
  const ProblemSpec s = make_quartic_quadratic(rng, 1, {1.0}, 1.0, 2.0, {.b_norm = 0.0});
  for (double t : {-1.5, 0.3, 2.0}) {
    const Vector x{{t}};
    CHECK(s.oracle.value(x) == doctest::Approx(0.5 * t * t + 0.25 * t * t * t * t));
    CHECK(s.oracle.gradient(x)[0] == doctest::Approx(t + t * t * t));
  }
  CHECK(s.oracle.gradient(Vector::Zero(1)).norm() == 0.0);
  CHECK(s.oracle.params.L2 == doctest::Approx(1.0 + 3.0 * 4.0));
  CHECK(s.oracle.params.L == doctest::Approx(12.0));
}

TEST_CASE("quartic_quadratic: Hv matches finite differences") {
  SeededRng rng(3);
  const ProblemSpec s = make_quartic_quadratic(rng, 10, fc_test::linspace(1.0, -1.0, 10), 0.1, 3.0);
  for (int k = 0; k < 20; ++k) {
    const Vector x = fc_test::point_in_ball(rng, 10, 3.0);
    CHECK(finite_diff_hv_check(s.oracle, x, gaussian_vector(rng, 10)) <= 1e-6);
  }
}

TEST_CASE("quartic_quadratic: argument errors") {
  SeededRng rng(4);
  CHECK_THROWS_AS(make_quartic_quadratic(rng, 3, {}, 1.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(make_quartic_quadratic(rng, 1, {1.0}, -1.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(make_quartic_quadratic(rng, 1, {1.0}, 1.0, 0.0), InvalidArgument);
}

TEST_CASE("saddle_escape closed forms") {
  const ProblemSpec s = make_saddle_escape(1.0, 2);
  const OracleSet& o = s.oracle;
  CHECK(o.value(Vector{{0.0, 1.0}}) == doctest::Approx(-0.25));
  CHECK(o.value(Vector{{0.0, -1.0}}) == doctest::Approx(-0.25));
  CHECK(o.gradient(Vector{{0.0, 1.0}}).norm() <= 1e-15);
  CHECK(o.gradient(Vector::Zero(2)).norm() == 0.0);
  CHECK(fc_test::lambda_min(fc_test::numeric_hessian(o, Vector::Zero(2))) == doctest::Approx(-1.0));
  REQUIRE(s.known_saddle);
  CHECK(s.known_saddle->lambda_min == -1.0);

  const ProblemSpec s4 = make_saddle_escape(4.0, 2);
  REQUIRE(s4.known_optimum);
  CHECK(std::abs(s4.known_optimum->point[1]) == doctest::Approx(2.0));
  CHECK(s4.known_optimum->value == doctest::Approx(-4.0));
  CHECK(s4.oracle.value(Vector{{0.0, 2.0}}) == doctest::Approx(-4.0));
  CHECK(s4.oracle.gradient(Vector{{0.0, -2.0}}).norm() <= 1e-14);
}

TEST_CASE("sigmoid derivative sups agree with closed forms and a grid") {
  CHECK(kSigmoidSecondDerivSup == doctest::Approx(1.0 / (6.0 * std::sqrt(3.0))).epsilon(1e-14));
  CHECK(kSigmoidThirdDerivSup == doctest::Approx(0.125).epsilon(1e-14));
  double s2 = 0.0, s3 = 0.0;
  for (double z = -20.0; z <= 20.0; z += 1e-3) {
    s2 = std::max(s2, std::abs(sigmoid_loss_d2(z)));
    s3 = std::max(s3, std::abs(sigmoid_loss_d3(z)));
  }
  CHECK(s2 <= kSigmoidSecondDerivSup + 1e-15);
  CHECK(s3 <= kSigmoidThirdDerivSup + 1e-15);
  CHECK(s2 >= kSigmoidSecondDerivSup - 1e-7);
  // Derivatives against central differences of the lower order.
  for (double z : {-3.0, -0.2, 0.0, 1.7}) {
    const double r = 1e-5;
    CHECK(sigmoid_loss_d1(z) == doctest::Approx((sigmoid_loss(z + r) - sigmoid_loss(z - r)) / (2 * r)).epsilon(1e-8));
    CHECK(sigmoid_loss_d2(z) == doctest::Approx((sigmoid_loss_d1(z + r) - sigmoid_loss_d1(z - r)) / (2 * r)).epsilon(1e-7));
    CHECK(sigmoid_loss_d3(z) == doctest::Approx((sigmoid_loss_d2(z + r) - sigmoid_loss_d2(z - r)) / (2 * r)).epsilon(1e-7));
  }
}

TEST_CASE("sigmoid_sum: single sample gradient at the origin") {
  Matrix a = Matrix::Zero(1, 3);
  a(0, 0) = 1.0;
  const ProblemSpec s = make_sigmoid_sum_from_data(a, Vector::Ones(1), 1.0);
  // phi'(0) = -phi(0)(1 - phi(0)) = -1/4.
  CHECK(s.oracle.gradient(Vector::Zero(3)).isApprox(Vector{{-0.25, 0.0, 0.0}}));
  CHECK(s.oracle.value(Vector::Zero(3)) == doctest::Approx(0.5));
}

TEST_CASE("sigmoid_sum: component spectral bound and rank structure") {
  SeededRng rng(5);
  const std::size_t d = 6, n = 4;
  const ProblemSpec s = make_sigmoid_sum(rng, d, n, 1.5);
  const OracleSet& o = s.oracle;
  for (int k = 0; k < 50; ++k) {
    const Vector x = fc_test::point_in_ball(rng, d, 4.0);
    for (std::size_t i = 0; i < n; ++i) {
      Matrix Hi(d, d);
      for (std::size_t j = 0; j < d; ++j) Hi.col(j) = o.component_hess_vec(i, x, Vector::Unit(d, j));
      const auto ev = fc_test::eigenvalues(0.5 * (Hi + Hi.transpose()));
      CHECK(ev.cwiseAbs().maxCoeff() <= o.params.L2 * (1 + 1e-12));
    }
  }
  // Directions orthogonal to every a_i are in the kernel of each component Hessian.
  Matrix a = Matrix::Zero(2, 4);
  a(0, 0) = 0.6;
  a(0, 1) = -0.8;
  a(1, 2) = 1.0;
  const ProblemSpec small = make_sigmoid_sum_from_data(a, Vector{{1.0, -1.0}}, 1.0);
  const Vector v{{0.8, 0.6, 0.0, 2.0}};
  for (int k = 0; k < 10; ++k) {
    const Vector x = gaussian_vector(rng, 4);
    CHECK(small.oracle.hess_vec(x, v).norm() <= 1e-15);
    CHECK(small.oracle.hess_vec(x, Vector::Unit(4, 2)).norm() > 0.0);
  }
}

TEST_CASE("mlp_regression: dimension and zero stationary point") {
  SeededRng rng(6);
  const ProblemSpec s = make_mlp_regression(rng, 3, 4, 10, {.target_scale = 0.0});
  CHECK(s.dim == 4 * (3 + 2) + 1);
  CHECK(s.constants_estimated);
  const Vector zero = Vector::Zero(static_cast<Eigen::Index>(s.dim));
  CHECK(s.oracle.value(zero) == 0.0);
  CHECK(s.oracle.gradient(zero).norm() == 0.0);
}

TEST_CASE("mlp_regression: output-layer gradient vanishes at zero hidden weights") {
  SeededRng rng(7);
  const std::size_t d_in = 2, h = 3;
  const ProblemSpec s = make_mlp_regression(rng, d_in, h, 12);
  Vector x = Vector::Zero(static_cast<Eigen::Index>(s.dim));
  x.tail(h + 1) = gaussian_vector(rng, h + 1);  // w2 and b2 only
  const Vector g = s.oracle.gradient(x);
  CHECK(g.segment(static_cast<Eigen::Index>(h * d_in + h), h).norm() == 0.0);
  CHECK(g.size() == static_cast<Eigen::Index>(s.dim));
}

TEST_CASE("mlp_regression: gradient and Hv against finite differences") {
  SeededRng rng(8);
  const ProblemSpec s = make_mlp_regression(rng, 3, 4, 20);
  for (int k = 0; k < 20; ++k) {
    const Vector x = fc_test::point_in_ball(rng, s.dim, 2.0);
    CHECK(finite_diff_hv_check(s.oracle, x, gaussian_vector(rng, s.dim)) <= 1e-5);
    const Vector num = fc_test::numeric_gradient(s.oracle.value, x);
    CHECK((num - s.oracle.gradient(x)).norm() <= 1e-6 * std::max(1.0, num.norm()));
  }
}

TEST_CASE("rosenbrock closed forms") {
  const ProblemSpec s = make_rosenbrock(2);
  CHECK(s.oracle.value(Vector::Ones(2)) == 0.0);
  CHECK(s.oracle.gradient(Vector::Ones(2)).norm() == 0.0);
  CHECK(s.oracle.value(Vector::Zero(2)) == 1.0);
  CHECK(s.oracle.gradient(Vector::Zero(2)).isApprox(Vector{{-2.0, 0.0}}));
  SeededRng rng(9);
  const ProblemSpec s5 = make_rosenbrock(5);
  for (int k = 0; k < 20; ++k) {
    const Vector x = fc_test::point_in_ball(rng, 5, 2.0);
    CHECK(finite_diff_hv_check(s5.oracle, x, gaussian_vector(rng, 5)) <= 1e-6);
  }
  CHECK_THROWS_AS(make_rosenbrock(1), InvalidArgument);
}

TEST_CASE("suite: oracle invariants at random points") {
  SeededRng rng(10);
  for (const auto& sp : fc_test::problem_suite()) {
    INFO(sp.label);
    const OracleSet& o = sp.spec.oracle;
    const std::size_t d = o.dim;
    for (int k = 0; k < 100; ++k) {
      const Vector x = fc_test::point_in_ball(rng, d, sp.sample_radius);
      const Vector u = gaussian_vector(rng, d), w = gaussian_vector(rng, d);
      const double a = rng.normal(), b = rng.normal();
      const Vector Hu = o.hess_vec(x, u), Hw = o.hess_vec(x, w);
      const Vector lin = o.hess_vec(x, a * u + b * w);
      CHECK((lin - (a * Hu + b * Hw)).norm() <= 1e-10 * std::max(1.0, lin.norm()));
      const double s1 = u.dot(Hw), s2 = w.dot(Hu);
      CHECK(std::abs(s1 - s2) <= 1e-10 * std::max({1.0, std::abs(s1), Hu.norm() * w.norm()}));
      CHECK(Hu.norm() <= o.params.L2 * u.norm() * (1 + 1e-12));
      if (o.is_finite_sum()) {
        Vector sum = Vector::Zero(d);
        for (std::size_t i = 0; i < o.n_components; ++i) sum += o.component_hess_vec(i, x, u);
        sum /= static_cast<double>(o.n_components);
        CHECK((sum - Hu).norm() <= 1e-12 * std::max(1.0, Hu.norm()));
      }
      if (k < 20) CHECK(finite_diff_hv_check(o, x, u) <= 1e-5);
    }
  }
}

TEST_CASE("suite: recorded L bounds the Hessian variation on the certified ball") {
  SeededRng rng(12);
  for (const auto& sp : fc_test::problem_suite()) {
    INFO(sp.label);
    const OracleSet& o = sp.spec.oracle;
    for (int k = 0; k < 200; ++k) {
      const Vector x = fc_test::point_in_ball(rng, o.dim, sp.sample_radius);
      const Vector y = fc_test::point_in_ball(rng, o.dim, sp.sample_radius);
      const Vector v = gaussian_unit_vector(rng, o.dim);
      const double diff = (o.hess_vec(x, v) - o.hess_vec(y, v)).norm();
      CHECK(diff <= o.params.L * (x - y).norm() * (1 + 1e-9) + 1e-12);
    }
  }
}

TEST_CASE("suite: known optima and saddles") {
  for (const auto& sp : fc_test::problem_suite()) {
    INFO(sp.label);
    const OracleSet& o = sp.spec.oracle;
    if (sp.spec.known_optimum) {
      const Vector& x = sp.spec.known_optimum->point;
      CHECK(o.gradient(x).norm() <= 1e-8);
      CHECK(o.value(x) == doctest::Approx(sp.spec.known_optimum->value));
      CHECK(dense_lambda_min(HvOperator::at(o, x).materialize()) >= -1e-8);
    }
    if (sp.spec.known_saddle) {
      const Vector& x = sp.spec.known_saddle->point;
      CHECK(o.gradient(x).norm() <= 1e-10);
      CHECK(std::abs(dense_lambda_min(HvOperator::at(o, x).materialize()) - sp.spec.known_saddle->lambda_min) <=
            1e-8);
    }
  }
}
