#include <doctest.h>

#include <cmath>

#include "dense_oracles.hpp"
#include "fastcubic/eigen_approx.hpp"
#include "fastcubic/errors.hpp"

using namespace fastcubic;

namespace {

ShiftedOperator dense_shifted(const Matrix& H, double shift) {
  const auto ev = fc_test::eigenvalues(H);
  return ShiftedOperator(HvOperator::from_matrix(H), shift, ev.minCoeff() + shift, ev.maxCoeff() + shift);
}

double inverse_rayleigh(const Matrix& H, double shift, const Vector& w) {
  return w.dot(fc_test::direct_solve(H, shift, w));
}

}  // namespace

TEST_CASE("power iteration count") {
  CHECK(power_iteration_count(1) == static_cast<int>(std::ceil(40.0 * std::log(1e6))));
  CHECK(power_iteration_count(30) == static_cast<int>(std::ceil(40.0 * std::log(30e6))));
}

TEST_CASE("inverse_power_leading: diagonal case") {
  const Matrix H = Vector{{1.0, -1.0}}.asDiagonal();
  SeededRng rng(31);
  const EigResult r = inverse_power_leading(dense_shifted(H, 1.5), rng);
  CHECK(std::abs(r.vector.norm() - 1.0) <= 1e-12);
  CHECK(std::abs(r.vector[1]) >= 0.999);
  CHECK(r.rayleigh >= 1.8);
  CHECK(r.rayleigh <= inverse_rayleigh(H, 1.5, r.vector) + 1e-12);
}

TEST_CASE("inverse_power_leading: isotropic case") {
  SeededRng rng(32);
  for (double shift : {0.0, 0.7, 5.0}) {
    const EigResult r = inverse_power_leading(dense_shifted(Matrix::Identity(4, 4), shift), rng);
    CHECK(r.rayleigh >= 0.9 / (1.0 + shift));
  }
}

TEST_CASE("inverse_power_leading: 9/10 bound on random matrices") {
  SeededRng rng(33);
  int failures = 0;
  for (int seed = 0; seed < 50; ++seed) {
    const auto d = static_cast<Eigen::Index>(seed < 10 ? 30 : 2 + rng.index(49));
    const Matrix H = fc_test::random_symmetric(rng, d, -1.0, 1.0);
    const double shift = -fc_test::lambda_min(H) + 0.5;
    SeededRng run(static_cast<std::uint64_t>(seed));
    const EigResult r = inverse_power_leading(dense_shifted(H, shift), run);
    const double top = 1.0 / (fc_test::lambda_min(H) + shift);
    if (!(r.rayleigh >= 0.9 * top)) ++failures;
    CHECK(r.rayleigh <= inverse_rayleigh(H, shift, r.vector) + 1e-9);
  }
  CHECK(failures <= 1);
}

TEST_CASE("approx_min_eigvec: diagonal case and sign flip") {
  const Matrix H = Vector{{1.0, -0.5}}.asDiagonal();
  SeededRng rng(34);
  const Vector g{{0.2, 0.3}};
  const EigResult r = approx_min_eigvec(HvOperator::from_matrix(H), 1.0, 100.0, rng, &g);
  CHECK(r.vector.dot(H * r.vector) <= -0.499);
  CHECK(r.rayleigh == doctest::Approx(r.vector.dot(H * r.vector)).epsilon(1e-12));
  CHECK(g.dot(r.vector) <= 0.0);
  CHECK(r.certified);
}

TEST_CASE("approx_min_eigvec: zero matrix") {
  SeededRng rng(35);
  const EigResult r = approx_min_eigvec(HvOperator::from_matrix(Matrix::Zero(5, 5)), 1.0, 100.0, rng);
  CHECK(std::abs(r.vector.norm() - 1.0) <= 1e-12);
  CHECK(r.vector.dot(Matrix::Zero(5, 5) * r.vector) <= 1.0 / 1000.0);
}

TEST_CASE("approx_min_eigvec: additive 1/(10 kappa) bound on random matrices") {
  SeededRng rng(36);
  int failures = 0;
  for (int seed = 0; seed < 50; ++seed) {
    const auto d = static_cast<Eigen::Index>(seed < 10 ? 30 : 2 + rng.index(49));
    const double L2 = 0.5 + 2.0 * rng.uniform();
    const Matrix H = fc_test::random_symmetric(rng, d, -L2, L2);
    const double kappa = seed % 2 == 0 ? 100.0 : 1000.0;
    SeededRng run(static_cast<std::uint64_t>(seed));
    const EigResult r = approx_min_eigvec(HvOperator::from_matrix(H), L2, kappa, run);
    const double q = r.vector.dot(H * r.vector);
    if (!(q - fc_test::lambda_min(H) <= 1.0 / (10.0 * kappa))) ++failures;
    CHECK(r.final_shift + fc_test::lambda_min(H) >= -1e-12);
  }
  CHECK(failures <= 1);
}

TEST_CASE("approx_min_eigvec: product count grows sublinearly in kappa") {
  // Diagonal spectrum with a gap at the bottom; counts should scale like
  // sqrt(kappa) up to logarithms, far below linear.
  Vector s(40);
  for (int i = 0; i < 40; ++i) s[i] = -1.0 + 2.0 * i / 39.0;
  const Matrix H = s.asDiagonal();
  std::vector<double> lk, lh;
  for (double kappa : {1e2, 1e3, 1e4}) {
    SeededRng rng(37);
    const EigResult r = approx_min_eigvec(HvOperator::from_matrix(H), 1.0, kappa, rng);
    lk.push_back(std::log(kappa));
    lh.push_back(std::log(static_cast<double>(r.hv_calls)));
  }
  const double slope = (lh[2] - lh[0]) / (lk[2] - lk[0]);
  CHECK(slope <= 0.75);
}

TEST_CASE("approx_min_eigvec: warm shift is honoured") {
  SeededRng gen(38);
  const Matrix H = fc_test::random_symmetric(gen, 12, -1.0, 1.0);
  const double lmin = fc_test::lambda_min(H);
  MinEigOptions opts;
  opts.initial_shift = -lmin + 0.01;
  opts.initial_gap_lower = 0.009;
  SeededRng rng(39);
  const EigResult r = approx_min_eigvec(HvOperator::from_matrix(H), 1.0, 300.0, rng, nullptr, opts);
  CHECK(r.vector.dot(H * r.vector) - lmin <= 1.0 / 3000.0);
  CHECK(r.final_shift <= opts.initial_shift + 1e-15);
}
