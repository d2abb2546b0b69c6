#include <doctest.h>

#include <cmath>

#include "dense_oracles.hpp"
#include "fastcubic/errors.hpp"
#include "fastcubic/oracles.hpp"
#include "fastcubic/problems.hpp"

using namespace fastcubic;

TEST_CASE("dot and norm on small vectors") {
  CHECK(dot(Vector::Unit(2, 0), Vector::Unit(2, 1)) == 0.0);
  CHECK(dot(Vector{{1.0, 2.0}}, Vector{{3.0, 4.0}}) == 11.0);
  const Vector v{{0.3, -1.2, 2.5}};
  CHECK(dot(v, v) == doctest::Approx(norm(v) * norm(v)).epsilon(1e-15));
  CHECK(norm(Vector{{3.0, 4.0}}) == 5.0);
  CHECK(norm(Vector::Zero(4)) == 0.0);
  CHECK(norm(Vector::Unit(7, 0)) == 1.0);
  CHECK_THROWS_AS(dot(Vector::Zero(2), Vector::Zero(3)), DimensionMismatch);
}

TEST_CASE("require_finite rejects NaN and infinity") {
  CHECK_NOTHROW(require_finite(Vector::Ones(3), "v"));
  CHECK_THROWS_AS(require_finite(Vector{{1.0, NAN}}, "v"), NumericalBreakdown);
  CHECK_THROWS_AS(require_finite(Vector{{INFINITY}}, "v"), NumericalBreakdown);
}

TEST_CASE("gaussian_unit_vector is unit and reproducible") {
  SeededRng a(17), b(17);
  for (std::size_t d : {1u, 2u, 10u, 333u}) {
    const Vector u = gaussian_unit_vector(a, d);
    const Vector w = gaussian_unit_vector(b, d);
    CHECK(u.size() == static_cast<Eigen::Index>(d));
    CHECK(std::abs(u.norm() - 1.0) <= 1e-12);
    CHECK(u == w);
    if (d == 1) CHECK(std::abs(u[0]) == 1.0);
  }
}

TEST_CASE("split streams are deterministic and distinct") {
  const SeededRng root(5);
  SeededRng s1 = root.split(1), s1b = root.split(1), s2 = root.split(2);
  const auto a = s1.next_u64(), b = s1b.next_u64(), c = s2.next_u64();
  CHECK(a == b);
  CHECK(a != c);
  SeededRng r(9);
  for (int i = 0; i < 1000; ++i) {
    const double u = r.uniform();
    CHECK((u >= 0.0 && u < 1.0));
    CHECK(r.index(7) < 7u);
  }
}

TEST_CASE("finite_diff_hv_check is exact on a quadratic") {
  SeededRng rng(3);
  const Matrix A = fc_test::random_symmetric(rng, 6, -2.0, 3.0);
  OracleSet o;
  o.dim = 6;
  o.value = [A](const Vector& x) { return 0.5 * x.dot(A * x); };
  o.gradient = [A](const Vector& x) -> Vector { return A * x; };
  o.hess_vec = [A](const Vector&, const Vector& v) -> Vector { return A * v; };
  for (int k = 0; k < 10; ++k) {
    const Vector x = gaussian_vector(rng, 6), v = gaussian_vector(rng, 6);
    CHECK(finite_diff_hv_check(o, x, v) <= 1e-10);
  }
  CHECK_THROWS_AS(finite_diff_hv_check(o, Vector::Zero(6), Vector::Ones(6), 0.0), InvalidArgument);
}

TEST_CASE("HvOperator tallies products by call site") {
  auto counter = std::make_shared<HvCounter>();
  const HvOperator op = HvOperator::from_matrix(Matrix::Identity(3, 3), counter);
  op.apply(Vector::Ones(3));
  op.apply(Vector::Ones(3));
  const HvOperator ver = op.with_site(CallSite::Verification);
  const Matrix M = ver.materialize();
  CHECK(M.isApprox(Matrix::Identity(3, 3)));
  CHECK(counter->full_calls(CallSite::Solver) == 2);
  CHECK(counter->full_calls(CallSite::Verification) == 3);
}

TEST_CASE("dense_lambda_min matches a diagonal") {
  CHECK(dense_lambda_min(Vector{{3.0, -2.0, 0.5}}.asDiagonal().toDenseMatrix()) == doctest::Approx(-2.0));
}
