#include "fastcubic/diagnostics.hpp"

#include <Eigen/QR>

#include <cmath>
#include <sstream>

#include "fastcubic/errors.hpp"

namespace fastcubic {
namespace {

Matrix haar_orthogonal(SeededRng& rng, std::size_t d) {
  Matrix G(d, d);
  for (Eigen::Index j = 0; j < G.cols(); ++j)
    for (Eigen::Index i = 0; i < G.rows(); ++i) G(i, j) = rng.normal();
  Eigen::HouseholderQR<Matrix> qr(G);
  Matrix Q = qr.householderQ();
  // Sign fix so the distribution is Haar rather than QR-biased.
  const Matrix R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < Q.cols(); ++j)
    if (R(j, j) < 0.0) Q.col(j) = -Q.col(j);
  return Q;
}

double log_uniform(SeededRng& rng, double lo, double hi) {
  return std::exp(std::log(lo) + rng.uniform() * (std::log(hi) - std::log(lo)));
}

std::string fmt(const char* what, double a, double b) {
  std::ostringstream os;
  os.precision(17);
  os << what << ": " << a << " vs " << b;
  return os.str();
}

}  // namespace

std::string to_string(InstanceKind k) {
  switch (k) {
    case InstanceKind::Easy: return "easy";
    case InstanceKind::Hard: return "hard";
    case InstanceKind::NearHard: return "near_hard";
    case InstanceKind::ZeroGradient: return "zero_gradient";
    case InstanceKind::Convex: return "convex";
  }
  return "easy";
}

DenseInstance random_instance(SeededRng& rng, std::size_t d, InstanceKind kind) {
  if (d == 0) throw InvalidArgument("random_instance: d must be positive");
  DenseInstance inst;
  inst.kind = kind;
  inst.L = log_uniform(rng, 0.5, 4.0);
  inst.L2 = log_uniform(rng, 0.5, 2.0);

  Vector spectrum(d);
  for (std::size_t j = 0; j < d; ++j) {
    const double u = rng.uniform();
    spectrum[j] = kind == InstanceKind::Convex ? inst.L2 * u : inst.L2 * (2.0 * u - 1.0);
  }
  Eigen::Index jmin = 0;
  spectrum.minCoeff(&jmin);
  if (kind == InstanceKind::Hard || kind == InstanceKind::NearHard || kind == InstanceKind::ZeroGradient) {
    // A clearly negative, simple bottom eigenvalue.
    spectrum[jmin] = -inst.L2 * (0.2 + 0.8 * rng.uniform());
    for (std::size_t j = 0; j < d; ++j)
      if (static_cast<Eigen::Index>(j) != jmin) spectrum[j] = std::max(spectrum[j], spectrum[jmin] + 0.05 * inst.L2);
  }
  const Matrix Q = haar_orthogonal(rng, d);
  inst.H = Q * spectrum.asDiagonal() * Q.transpose();
  inst.H = 0.5 * (inst.H + inst.H.transpose());

  inst.g = gaussian_vector(rng, d) * log_uniform(rng, 1e-4, 1.0) / std::sqrt(static_cast<double>(d));
  const Vector q = Q.col(jmin);
  switch (kind) {
    case InstanceKind::Hard:
      inst.g -= q.dot(inst.g) * q;
      break;
    case InstanceKind::NearHard: {
      inst.g -= q.dot(inst.g) * q;
      inst.g += 1e-6 * inst.g.norm() * q;
      break;
    }
    case InstanceKind::ZeroGradient:
      inst.g.setZero();
      break;
    default:
      break;
  }
  return inst;
}

DenseInstance near_optimal_instance(SeededRng& rng, std::size_t d, double threshold) {
  if (!(threshold > 0.0)) throw InvalidArgument("near_optimal_instance: threshold must be positive");
  DenseInstance inst;
  inst.kind = InstanceKind::Easy;
  inst.L = log_uniform(rng, 0.5, 4.0);
  inst.L2 = log_uniform(rng, 0.5, 2.0);
  // m* <= -2|lambda_min|^3 / (3 L^2) forces |lambda_min| below this.
  const double neg_cap = 0.5 * std::cbrt(1.5 * inst.L * inst.L * threshold);
  Vector spectrum(d);
  for (std::size_t j = 0; j < d; ++j) spectrum[j] = -neg_cap + (inst.L2 + neg_cap) * rng.uniform();
  const Matrix Q = haar_orthogonal(rng, d);
  inst.H = Q * spectrum.asDiagonal() * Q.transpose();
  inst.H = 0.5 * (inst.H + inst.H.transpose());
  inst.g = gaussian_unit_vector(rng, d) * log_uniform(rng, 1e-3, 1.0);
  for (int k = 0; k < 200; ++k) {
    const ExactSolution ex = exact_solve_dense(inst.g, inst.H, inst.L);
    if (ex.m_star >= -threshold) return inst;
    inst.g *= 0.5;
  }
  throw InvalidArgument("near_optimal_instance: could not reach the threshold");
}

ScheduleReport check_schedule(const CubicSolution& sol, double lambda_min, double lambda_max, double kappa,
                              double tol) {
  ScheduleReport rep;
  const double B = sol.B;
  const double floor = 3.0 / (10.0 * kappa);
  std::vector<const TraceRecord*> main;
  for (const TraceRecord& r : sol.trace)
    if (!r.binary) main.push_back(&r);
  rep.main_steps = static_cast<int>(main.size());

  for (std::size_t k = 0; k < main.size(); ++k) {
    const TraceRecord& r = *main[k];
    const double lam = r.lambda;
    const double gap = lam + lambda_min;
    if (lam < -tol || lam > 2.0 * B * (1.0 + tol)) rep.violations.push_back({r.i, fmt("lambda outside [0, 2B]", lam, 2.0 * B)});
    if (lam + lambda_max > 3.0 * B * (1.0 + tol)) rep.violations.push_back({r.i, fmt("lambda + lambda_max > 3B", lam + lambda_max, 3.0 * B)});
    if (gap < floor - tol) rep.violations.push_back({r.i, fmt("gap below 3/(10 kappa)", gap, floor)});
    if (std::isfinite(r.delta)) {
      ++rep.eig_steps;
      if (r.delta < 0.5 * gap * (1.0 - tol) - tol) rep.violations.push_back({r.i, fmt("Delta below gap/2", r.delta, 0.5 * gap)});
      if (r.delta > 0.625 * gap * (1.0 + tol) + tol) rep.violations.push_back({r.i, fmt("Delta above 5 gap/8", r.delta, 0.625 * gap)});
    }
    if (k + 1 < main.size()) {
      const double next = main[k + 1]->lambda;
      const double next_gap = next + lambda_min;
      if (next != 0.0 && next_gap > 0.75 * gap + tol) rep.violations.push_back({r.i, fmt("no 3/4 contraction", next_gap, 0.75 * gap)});
    }
    if (r.decision == "eig" && gap > 1.0 / kappa + tol) rep.violations.push_back({r.i, fmt("exit gap above 1/kappa", gap, 1.0 / kappa)});
  }
  if (sol.branch == Branch::Case1Binary && sol.binary_iterations > sol.binary_bound + 5) {
    rep.violations.push_back({sol.binary_iterations, fmt("binary search over bound + 5", sol.binary_iterations, sol.binary_bound + 5.0)});
  }
  return rep;
}

}  // namespace fastcubic
