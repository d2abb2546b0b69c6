#pragma once

// Independent dense reference computations used to check the matrix-free code.

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <cmath>

#include "fastcubic/oracles.hpp"

namespace fc_test {

using fastcubic::Matrix;
using fastcubic::SeededRng;
using fastcubic::Vector;

inline Eigen::VectorXd eigenvalues(const Matrix& H) {
  return Eigen::SelfAdjointEigenSolver<Matrix>(H, Eigen::EigenvaluesOnly).eigenvalues();
}

inline double lambda_min(const Matrix& H) { return eigenvalues(H).minCoeff(); }
inline double lambda_max(const Matrix& H) { return eigenvalues(H).maxCoeff(); }

inline Vector direct_solve(const Matrix& H, double shift, const Vector& b) {
  const Matrix A = H + shift * Matrix::Identity(H.rows(), H.cols());
  return A.ldlt().solve(b);
}

inline Matrix haar_orthogonal(SeededRng& rng, Eigen::Index d) {
  Matrix G(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) G(i, j) = rng.normal();
  Eigen::HouseholderQR<Matrix> qr(G);
  Matrix Q = qr.householderQ();
  const Matrix R = qr.matrixQR();
  for (Eigen::Index j = 0; j < d; ++j)
    if (R(j, j) < 0) Q.col(j) *= -1.0;
  return Q;
}

inline Matrix with_spectrum(SeededRng& rng, const Vector& spectrum) {
  const Matrix Q = haar_orthogonal(rng, spectrum.size());
  return Q * spectrum.asDiagonal() * Q.transpose();
}

inline Matrix random_symmetric(SeededRng& rng, Eigen::Index d, double lo, double hi) {
  Vector s(d);
  for (Eigen::Index i = 0; i < d; ++i) s[i] = lo + (hi - lo) * rng.uniform();
  return with_spectrum(rng, s);
}

// m(h) evaluated straight from the dense matrix.
inline double cubic_m(const Vector& g, const Matrix& H, double L, const Vector& h) {
  return g.dot(h) + 0.5 * h.dot(H * h) + L / 6.0 * std::pow(h.norm(), 3);
}

inline Matrix numeric_hessian(const fastcubic::OracleSet& o, const Vector& x, double r = 1e-5) {
  const auto d = static_cast<Eigen::Index>(o.dim);
  Matrix H(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    Vector e = Vector::Zero(d);
    e[j] = r;
    H.col(j) = (o.gradient(x + e) - o.gradient(x - e)) / (2 * r);
  }
  return 0.5 * (H + H.transpose());
}

inline Vector numeric_gradient(const std::function<double(const Vector&)>& f, const Vector& x, double r = 1e-6) {
  Vector g(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    Vector e = Vector::Zero(x.size());
    e[j] = r;
    g[j] = (f(x + e) - f(x - e)) / (2 * r);
  }
  return g;
}

}  // namespace fc_test
