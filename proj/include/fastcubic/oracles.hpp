#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <random>

namespace fastcubic {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

double dot(const Vector& u, const Vector& v);
double norm(const Vector& v);

/// Throws NumericalBreakdown if any entry of `v` is NaN or infinite.
void require_finite(const Vector& v, const char* what);

/// Deterministic 64-bit generator. Streams are split by hashing the parent
/// seed with a stream id, so derived generators never share state.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed = 0);

  std::uint64_t seed() const { return seed_; }

  /// Independent generator for stream `stream_id`.
  SeededRng split(std::uint64_t stream_id) const;

  double normal();
  double uniform();  // in [0, 1)
  std::size_t index(std::size_t n);  // uniform in [0, n)
  std::uint64_t next_u64() { return engine_(); }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Unit vector drawn by normalizing i.i.d. standard normals.
Vector gaussian_unit_vector(SeededRng& rng, std::size_t dim);
Vector gaussian_vector(SeededRng& rng, std::size_t dim);

struct SmoothnessParams {
  double L = 1.0;   // Hessian Lipschitz constant
  double L2 = 1.0;  // spectral bound on the Hessian (gradient Lipschitz)

  void validate() const;
};

/// Bundled evaluators for an objective. `component_hess_vec` is empty unless
/// the objective is a finite sum f = (1/n) sum_i f_i.
struct OracleSet {
  std::size_t dim = 0;
  std::size_t n_components = 1;
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;
  std::function<Vector(const Vector&, const Vector&)> hess_vec;
  std::function<Vector(std::size_t, const Vector&, const Vector&)> component_hess_vec;
  SmoothnessParams params;

  bool is_finite_sum() const { return static_cast<bool>(component_hess_vec); }
};

/// Where a Hessian-vector product was requested from. Verification calls
/// (dense materialization for exact oracles and certificates) are tallied
/// separately so they never leak into benchmark operation counts.
enum class CallSite : int { Solver = 0, Verification = 1 };

struct HvCounter {
  std::array<long long, 2> full{0, 0};
  std::array<long long, 2> component{0, 0};

  long long full_calls(CallSite s) const { return full[static_cast<int>(s)]; }
  long long component_calls(CallSite s) const { return component[static_cast<int>(s)]; }
  /// Full-Hessian equivalents: full calls plus component calls divided by n.
  double equivalent_calls(CallSite s, std::size_t n_components) const;
};

/// A Hessian (or any symmetric matrix) available only through products,
/// frozen at one point. Every product is tallied on the shared counter under
/// the operator's call site.
class HvOperator {
 public:
  using Apply = std::function<Vector(const Vector&)>;
  using ComponentApply = std::function<Vector(std::size_t, const Vector&)>;

  HvOperator() = default;
  HvOperator(std::size_t dim, Apply apply, std::size_t n_components = 1,
             ComponentApply component = {},
             std::shared_ptr<HvCounter> counter = nullptr,
             CallSite site = CallSite::Solver);

  /// Hessian of `oracle` at `x`.
  static HvOperator at(const OracleSet& oracle, const Vector& x,
                       std::shared_ptr<HvCounter> counter = nullptr,
                       CallSite site = CallSite::Solver);
  static HvOperator from_matrix(Matrix H, std::shared_ptr<HvCounter> counter = nullptr,
                                CallSite site = CallSite::Solver);

  /// Same products, tallied under a different call site.
  HvOperator with_site(CallSite site) const;

  std::size_t dim() const { return dim_; }
  std::size_t n_components() const { return n_components_; }
  bool has_components() const { return static_cast<bool>(component_); }
  const std::shared_ptr<HvCounter>& counter() const { return counter_; }
  CallSite site() const { return site_; }

  Vector apply(const Vector& v) const;
  Vector apply_component(std::size_t i, const Vector& v) const;

  /// Dense matrix built column by column from `dim` products.
  Matrix materialize() const;

 private:
  std::size_t dim_ = 0;
  std::size_t n_components_ = 1;
  Apply apply_;
  ComponentApply component_;
  std::shared_ptr<HvCounter> counter_;
  CallSite site_ = CallSite::Solver;
};

/// Relative error between the central difference of the gradient along `v`
/// and the analytic Hessian-vector product.
double finite_diff_hv_check(const OracleSet& oracle, const Vector& x, const Vector& v,
                            double r = 1e-5);

/// Smallest eigenvalue of a symmetric dense matrix.
double dense_lambda_min(const Matrix& H);

}  // namespace fastcubic
