#include "fastcubic/oracles.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>
#include <utility>

#include "fastcubic/errors.hpp"

namespace fastcubic {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void check_same_dim(const Vector& u, const Vector& v) {
  if (u.size() != v.size()) {
    throw DimensionMismatch("vector dimensions differ: " + std::to_string(u.size()) +
                            " vs " + std::to_string(v.size()));
  }
}

}  // namespace

double dot(const Vector& u, const Vector& v) {
  check_same_dim(u, v);
  return u.dot(v);
}

double norm(const Vector& v) { return v.norm(); }

void require_finite(const Vector& v, const char* what) {
  if (!v.allFinite()) throw NumericalBreakdown(std::string("non-finite entry in ") + what);
}

SeededRng::SeededRng(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

SeededRng SeededRng::split(std::uint64_t stream_id) const {
  return SeededRng(splitmix64(seed_ ^ splitmix64(stream_id + 0x632be59bd9b4e019ULL)));
}

double SeededRng::normal() { return normal_(engine_); }

double SeededRng::uniform() {
  // 53 random mantissa bits.
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::size_t SeededRng::index(std::size_t n) {
  return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
}

Vector gaussian_vector(SeededRng& rng, std::size_t dim) {
  Vector v(static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = rng.normal();
  return v;
}

Vector gaussian_unit_vector(SeededRng& rng, std::size_t dim) {
  if (dim == 0) throw InvalidArgument("gaussian_unit_vector: dim must be >= 1");
  Vector v = gaussian_vector(rng, dim);
  double n = v.norm();
  while (n == 0.0) {
    v = gaussian_vector(rng, dim);
    n = v.norm();
  }
  return v / n;
}

void SmoothnessParams::validate() const {
  if (!(L > 0.0) || !std::isfinite(L)) throw InvalidArgument("L must be positive and finite");
  if (!(L2 > 0.0) || !std::isfinite(L2)) throw InvalidArgument("L2 must be positive and finite");
}

double HvCounter::equivalent_calls(CallSite s, std::size_t n_components) const {
  const int k = static_cast<int>(s);
  return static_cast<double>(full[k]) +
         static_cast<double>(component[k]) / static_cast<double>(n_components == 0 ? 1 : n_components);
}

HvOperator::HvOperator(std::size_t dim, Apply apply, std::size_t n_components,
                       ComponentApply component, std::shared_ptr<HvCounter> counter,
                       CallSite site)
    : dim_(dim),
      n_components_(n_components == 0 ? 1 : n_components),
      apply_(std::move(apply)),
      component_(std::move(component)),
      counter_(counter ? std::move(counter) : std::make_shared<HvCounter>()),
      site_(site) {}

HvOperator HvOperator::at(const OracleSet& oracle, const Vector& x,
                          std::shared_ptr<HvCounter> counter, CallSite site) {
  if (static_cast<std::size_t>(x.size()) != oracle.dim) {
    throw DimensionMismatch("HvOperator::at: point dimension does not match oracle");
  }
  // The oracle set is copied so the operator stays valid on its own.
  auto hv = oracle.hess_vec;
  Apply apply = [hv, x](const Vector& v) { return hv(x, v); };
  ComponentApply component;
  if (oracle.is_finite_sum()) {
    auto chv = oracle.component_hess_vec;
    component = [chv, x](std::size_t i, const Vector& v) { return chv(i, x, v); };
  }
  return HvOperator(oracle.dim, std::move(apply), oracle.n_components, std::move(component),
                    std::move(counter), site);
}

HvOperator HvOperator::from_matrix(Matrix H, std::shared_ptr<HvCounter> counter, CallSite site) {
  if (H.rows() != H.cols()) throw DimensionMismatch("from_matrix: matrix must be square");
  const auto d = static_cast<std::size_t>(H.rows());
  auto shared = std::make_shared<const Matrix>(std::move(H));
  return HvOperator(d, [shared](const Vector& v) -> Vector { return (*shared) * v; }, 1, {},
                    std::move(counter), site);
}

HvOperator HvOperator::with_site(CallSite site) const {
  HvOperator copy = *this;
  copy.site_ = site;
  return copy;
}

Vector HvOperator::apply(const Vector& v) const {
  if (static_cast<std::size_t>(v.size()) != dim_) {
    throw DimensionMismatch("HvOperator::apply: dimension mismatch");
  }
  ++counter_->full[static_cast<int>(site_)];
  return apply_(v);
}

Vector HvOperator::apply_component(std::size_t i, const Vector& v) const {
  if (!component_) throw InvalidArgument("operator has no finite-sum components");
  if (i >= n_components_) throw InvalidArgument("component index out of range");
  if (static_cast<std::size_t>(v.size()) != dim_) {
    throw DimensionMismatch("HvOperator::apply_component: dimension mismatch");
  }
  ++counter_->component[static_cast<int>(site_)];
  return component_(i, v);
}

Matrix HvOperator::materialize() const {
  const auto d = static_cast<Eigen::Index>(dim_);
  Matrix H(d, d);
  Vector e = Vector::Zero(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    e[j] = 1.0;
    H.col(j) = apply(e);
    e[j] = 0.0;
  }
  // Products are symmetric up to roundoff.
  return 0.5 * (H + H.transpose());
}

double finite_diff_hv_check(const OracleSet& oracle, const Vector& x, const Vector& v, double r) {
  if (!(r > 0.0)) throw InvalidArgument("finite_diff_hv_check: r must be positive");
  const Vector fd = (oracle.gradient(x + r * v) - oracle.gradient(x - r * v)) / (2.0 * r);
  const Vector hv = oracle.hess_vec(x, v);
  return (fd - hv).norm() / std::max(1.0, hv.norm());
}

double dense_lambda_min(const Matrix& H) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(H, Eigen::EigenvaluesOnly);
  return es.eigenvalues()[0];
}

}  // namespace fastcubic
