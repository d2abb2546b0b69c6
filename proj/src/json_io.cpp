#include "fastcubic/json_io.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <set>
#include <string>

#include "fastcubic/errors.hpp"

namespace fastcubic {
namespace {

// NaN and infinities become null, which JSON can represent.
Json num(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

double number_from(const Json& j, const char* what) {
  if (!j.is_number()) throw ConfigError(std::string(what) + " must be a number");
  return j.get<double>();
}

}  // namespace

Json vector_to_json(const Vector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(num(v[i]));
  return a;
}

Vector vector_from_json(const Json& j, const char* what) {
  if (!j.is_array()) throw ConfigError(std::string(what) + " must be an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = number_from(j[i], what);
  return v;
}

Matrix matrix_from_json(const Json& j, const char* what) {
  if (!j.is_array()) throw ConfigError(std::string(what) + " must be an array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows == 0 ? 0 : static_cast<Eigen::Index>(j[0].size());
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Vector row = vector_from_json(j[static_cast<std::size_t>(r)], what);
    if (row.size() != cols) throw ConfigError(std::string(what) + " has ragged rows");
    m.row(r) = row.transpose();
  }
  return m;
}

DenseInstance instance_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("cubic subproblem must be a JSON object");
  static const std::set<std::string> known{"g", "H", "L", "L2"};
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!known.count(key)) throw ConfigError("unknown key '" + key + "' in cubic subproblem");
  }
  if (!j.contains("g")) throw ConfigError("cubic subproblem needs 'g'");
  DenseInstance inst;
  inst.g = vector_from_json(j.at("g"), "g");
  const Eigen::Index d = inst.g.size();
  if (d == 0) throw ConfigError("g must be non-empty");
  inst.H = j.contains("H") ? matrix_from_json(j.at("H"), "H") : Matrix::Zero(d, d);
  if (inst.H.rows() != d || inst.H.cols() != d) throw ConfigError("H must be square with the dimension of g");
  if ((inst.H - inst.H.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, inst.H.cwiseAbs().maxCoeff()))
    throw ConfigError("H must be symmetric");
  inst.L = j.contains("L") ? number_from(j.at("L"), "L") : 1.0;
  if (!(inst.L > 0.0)) throw ConfigError("L must be positive");
  if (j.contains("L2")) {
    inst.L2 = number_from(j.at("L2"), "L2");
  } else {
    inst.L2 = std::max(1e-12, inst.H.selfadjointView<Eigen::Lower>().operatorNorm());
  }
  if (!(inst.L2 > 0.0)) throw ConfigError("L2 must be positive");
  return inst;
}

Json instance_to_json(const DenseInstance& inst) {
  Json H = Json::array();
  for (Eigen::Index r = 0; r < inst.H.rows(); ++r) H.push_back(vector_to_json(inst.H.row(r).transpose()));
  return Json{{"g", vector_to_json(inst.g)}, {"H", H}, {"L", inst.L}, {"L2", inst.L2}};
}

Json to_json(const Certificate& c) {
  return Json{{"grad_norm", num(c.grad_norm)}, {"lambda_min_hessian", num(c.lambda_min_hessian)},
              {"eps", c.eps}, {"L", c.L}, {"passed", c.passed}};
}

Json to_json(const CubicSolution& s) {
  Json trace = Json::array();
  for (const TraceRecord& r : s.trace) {
    trace.push_back(Json{{"i", r.i}, {"lambda", num(r.lambda)}, {"v_norm", num(r.v_norm)}, {"delta", num(r.delta)},
                         {"decision", r.decision}, {"mu_lower", num(r.mu_lower)}, {"hv_calls", r.hv_calls},
                         {"binary_search", r.binary}});
  }
  Json j{{"lambda", num(s.lambda)},
         {"v", vector_to_json(s.v)},
         {"v_min", s.v_min ? vector_to_json(*s.v_min) : Json(nullptr)},
         {"branch", to_string(s.branch)},
         {"hv_calls", s.hv_calls},
         {"B", num(s.B)},
         {"eps_tilde", num(s.eps_tilde)},
         {"eps_tilde_theory_log10", num(s.eps_tilde_theory_log10)},
         {"eps_hat", num(s.eps_hat)},
         {"lambda_steps", s.lambda_steps},
         {"binary_iterations", s.binary_iterations},
         {"binary_bound", s.binary_bound},
         {"trace", trace}};
  return j;
}

Json to_json(const ExactSolution& e) {
  return Json{{"lambda_star", num(e.lambda_star)}, {"h_star", vector_to_json(e.h_star)},
              {"m_star", num(e.m_star)},           {"hard_case", e.hard_case},
              {"lambda_min", num(e.lambda_min)}};
}

Json to_json(const RunReport& r) {
  Json iters = Json::array();
  for (const IterationRecord& it : r.iterations) {
    iters.push_back(Json{{"iter", it.iter}, {"f", num(it.f)}, {"grad_norm", num(it.grad_norm)}, {"m", num(it.m)},
                         {"branch", it.branch}, {"lambda", num(it.lambda)}, {"inner_hv", it.inner_hv},
                         {"cum_hv", it.cum_hv}, {"cum_grad", it.cum_grad}});
  }
  return Json{{"method", r.method},
              {"status", to_string(r.status)},
              {"converged", r.converged},
              {"left_ball", r.left_ball},
              {"certificate", r.certificate ? to_json(*r.certificate) : Json(nullptr)},
              {"outer_iters", r.outer_iters},
              {"hv_calls", r.hv_calls},
              {"grad_calls", r.grad_calls},
              {"verification_hv_calls", r.verification_hv_calls},
              {"f0", num(r.f0)},
              {"final_f", num(r.final_f)},
              {"final_grad_norm", num(r.final_grad_norm)},
              {"final_lambda_min", r.final_lambda_min ? num(*r.final_lambda_min) : Json(nullptr)},
              {"observed_decrease", num(r.observed_decrease)},
              {"wall_ms", num(r.wall_ms)},
              {"error", r.error},
              {"iterations", iters}};
}

}  // namespace fastcubic
