#include "fastcubic/problems.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>

#include "fastcubic/errors.hpp"

namespace fastcubic {
namespace {

Matrix random_orthogonal(SeededRng& rng, std::size_t d) {
  const auto n = static_cast<Eigen::Index>(d);
  Matrix g(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) g(i, j) = rng.normal();
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < n; ++j)
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  return q;
}

Vector uniform_in_ball(SeededRng& rng, std::size_t d, double R) {
  const Vector u = gaussian_unit_vector(rng, d);
  return R * std::pow(rng.uniform(), 1.0 / static_cast<double>(d)) * u;
}

}  // namespace

// ---------------------------------------------------------------------------
// Quartic-regularized quadratic

ProblemSpec make_quartic_quadratic(SeededRng& rng, std::size_t d, const std::vector<double>& spectrum,
                                   double rho, double R, QuarticQuadraticOptions opts) {
  if (spectrum.empty()) throw InvalidArgument("make_quartic_quadratic: empty spectrum");
  if (spectrum.size() != d) throw DimensionMismatch("make_quartic_quadratic: spectrum size must equal d");
  if (rho < 0.0) throw InvalidArgument("make_quartic_quadratic: rho must be >= 0");
  if (!(R > 0.0)) throw InvalidArgument("make_quartic_quadratic: R must be positive");

  const auto n = static_cast<Eigen::Index>(d);
  Vector lam(n);
  for (Eigen::Index i = 0; i < n; ++i) lam[i] = spectrum[static_cast<std::size_t>(i)];

  struct Data {
    Matrix A;
    Vector b;
    double rho;
  };
  auto data = std::make_shared<Data>();
  if (opts.rotate) {
    const Matrix q = random_orthogonal(rng, d);
    data->A = q * lam.asDiagonal() * q.transpose();
    data->A = 0.5 * (data->A + data->A.transpose());
  } else {
    data->A = lam.asDiagonal();
  }
  data->b = opts.b_norm > 0.0 ? Vector(opts.b_norm * gaussian_unit_vector(rng, d)) : Vector(Vector::Zero(n));
  data->rho = rho;

  ProblemSpec spec;
  spec.name = "quartic_quadratic";
  spec.dim = d;
  spec.domain_radius = R;
  spec.generator_params = {{"d", static_cast<double>(d)}, {"rho", rho}, {"R", R}, {"b_norm", opts.b_norm}};

  OracleSet& o = spec.oracle;
  o.dim = d;
  o.value = [data](const Vector& x) {
    const double r2 = x.squaredNorm();
    return 0.5 * x.dot(data->A * x) + data->b.dot(x) + 0.25 * data->rho * r2 * r2;
  };
  o.gradient = [data](const Vector& x) -> Vector {
    return data->A * x + data->b + data->rho * x.squaredNorm() * x;
  };
  o.hess_vec = [data](const Vector& x, const Vector& v) -> Vector {
    return data->A * v + data->rho * (x.squaredNorm() * v + 2.0 * x.dot(v) * x);
  };
  const double max_abs = lam.cwiseAbs().maxCoeff();
  o.params.L2 = std::max(max_abs + 3.0 * rho * R * R, 1e-12);
  o.params.L = rho > 0.0 ? 6.0 * rho * R : 1.0;
  return spec;
}

// ---------------------------------------------------------------------------
// Saddle escape

ProblemSpec make_saddle_escape(double gamma, std::size_t d) {
  if (!(gamma > 0.0)) throw InvalidArgument("make_saddle_escape: gamma must be positive");
  if (d < 2) throw InvalidArgument("make_saddle_escape: d must be >= 2");

  const auto n = static_cast<Eigen::Index>(d);
  Vector curv = Vector::Ones(n);
  curv[n - 1] = -gamma;

  ProblemSpec spec;
  spec.name = "saddle_escape";
  spec.dim = d;
  // Contains both minimizers with room to spare.
  spec.domain_radius = 2.0 * std::max(1.0, std::sqrt(gamma));
  spec.generator_params = {{"gamma", gamma}, {"d", static_cast<double>(d)}};

  OracleSet& o = spec.oracle;
  o.dim = d;
  o.value = [curv](const Vector& x) {
    return 0.5 * (curv.array() * x.array().square()).sum() + 0.25 * x.array().pow(4).sum();
  };
  o.gradient = [curv](const Vector& x) -> Vector {
    return (curv.array() * x.array() + x.array().cube()).matrix();
  };
  o.hess_vec = [curv](const Vector& x, const Vector& v) -> Vector {
    return ((curv.array() + 3.0 * x.array().square()) * v.array()).matrix();
  };
  const double R = spec.domain_radius;
  o.params.L2 = std::max(1.0, gamma) + 3.0 * R * R;
  o.params.L = 6.0 * R;

  spec.known_saddle = KnownSaddle{Vector::Zero(n), -gamma};
  Vector xstar = Vector::Zero(n);
  xstar[n - 1] = std::sqrt(gamma);
  spec.known_optimum = KnownOptimum{xstar, -gamma * gamma / 4.0};
  return spec;
}

// ---------------------------------------------------------------------------
// Sigmoid finite sum

double sigmoid_loss(double z) {
  // 1 / (1 + e^z) without overflow.
  if (z > 0.0) {
    const double e = std::exp(-z);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(z));
}

double sigmoid_loss_d1(double z) {
  const double s = sigmoid_loss(z);
  return -s * (1.0 - s);
}

double sigmoid_loss_d2(double z) {
  const double s = sigmoid_loss(z);
  return s * (1.0 - s) * (1.0 - 2.0 * s);
}

double sigmoid_loss_d3(double z) {
  const double s = sigmoid_loss(z);
  return -s * (1.0 - s) * (1.0 - 6.0 * s + 6.0 * s * s);
}

ProblemSpec make_sigmoid_sum_from_data(const Matrix& a, const Vector& y, double data_scale) {
  if (a.rows() == 0 || a.cols() == 0) throw InvalidArgument("make_sigmoid_sum: need n, d >= 1");
  if (a.rows() != y.size()) throw DimensionMismatch("make_sigmoid_sum: labels do not match samples");
  if (!(data_scale > 0.0)) throw InvalidArgument("make_sigmoid_sum: data_scale must be positive");

  struct Data {
    Matrix a;  // n x d, one sample per row
    Vector y;
  };
  auto data = std::make_shared<Data>(Data{a, y});
  const auto n = static_cast<std::size_t>(a.rows());
  const auto d = static_cast<std::size_t>(a.cols());
  const double inv_n = 1.0 / static_cast<double>(n);

  ProblemSpec spec;
  spec.name = "sigmoid_sum";
  spec.dim = d;
  spec.n_components = n;
  spec.generator_params = {{"d", static_cast<double>(d)}, {"n", static_cast<double>(n)},
                           {"data_scale", data_scale}};

  OracleSet& o = spec.oracle;
  o.dim = d;
  o.n_components = n;
  o.value = [data, inv_n](const Vector& x) {
    const Vector z = data->y.cwiseProduct(data->a * x);
    double s = 0.0;
    for (Eigen::Index i = 0; i < z.size(); ++i) s += sigmoid_loss(z[i]);
    return s * inv_n;
  };
  o.gradient = [data, inv_n](const Vector& x) -> Vector {
    const Vector z = data->y.cwiseProduct(data->a * x);
    Vector w(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) w[i] = sigmoid_loss_d1(z[i]) * data->y[i];
    return inv_n * (data->a.transpose() * w);
  };
  o.hess_vec = [data, inv_n](const Vector& x, const Vector& v) -> Vector {
    const Vector z = data->y.cwiseProduct(data->a * x);
    const Vector av = data->a * v;
    Vector w(z.size());
    // y_i^2 = 1
    for (Eigen::Index i = 0; i < z.size(); ++i) w[i] = sigmoid_loss_d2(z[i]) * av[i];
    return inv_n * (data->a.transpose() * w);
  };
  o.component_hess_vec = [data](std::size_t i, const Vector& x, const Vector& v) -> Vector {
    const auto r = static_cast<Eigen::Index>(i);
    const double z = data->y[r] * data->a.row(r).dot(x);
    return (sigmoid_loss_d2(z) * data->a.row(r).dot(v)) * data->a.row(r).transpose();
  };
  o.params.L2 = kSigmoidSecondDerivSup * data_scale * data_scale;
  o.params.L = kSigmoidThirdDerivSup * data_scale * data_scale * data_scale;
  return spec;
}

ProblemSpec make_sigmoid_sum(SeededRng& rng, std::size_t d, std::size_t n, double data_scale) {
  if (n < 1 || d < 1) throw InvalidArgument("make_sigmoid_sum: need n, d >= 1");
  const auto rows = static_cast<Eigen::Index>(n);
  Matrix a(rows, static_cast<Eigen::Index>(d));
  Vector y(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    // Radii in [0.5, 1] * data_scale keep every sample inside the bound.
    const double radius = data_scale * (0.5 + 0.5 * rng.uniform());
    a.row(i) = radius * gaussian_unit_vector(rng, d).transpose();
    y[i] = rng.uniform() < 0.5 ? -1.0 : 1.0;
  }
  return make_sigmoid_sum_from_data(a, y, data_scale);
}

// ---------------------------------------------------------------------------
// Tanh MLP regression

namespace {

struct MlpData {
  std::size_t d_in = 0;
  std::size_t hidden = 0;
  Matrix inputs;  // n x d_in
  Vector targets;

  std::size_t dim() const { return hidden * (d_in + 2) + 1; }
};

using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct MlpParams {
  Eigen::Map<const RowMajorMatrix> w1;  // hidden x d_in
  Eigen::Map<const Vector> b1;
  Eigen::Map<const Vector> w2;
  double b2;
};

MlpParams unpack(const MlpData& m, const Vector& x) {
  const auto h = static_cast<Eigen::Index>(m.hidden);
  const auto din = static_cast<Eigen::Index>(m.d_in);
  return MlpParams{
      Eigen::Map<const RowMajorMatrix>(x.data(), h, din),
      Eigen::Map<const Vector>(x.data() + h * din, h),
      Eigen::Map<const Vector>(x.data() + h * din + h, h), x[h * din + 2 * h]};
}

// Gradient (and, when `dir` is given, the R-operator product) of the loss of
// samples [first, last).
void mlp_backprop(const MlpData& m, const Vector& x, const Vector* dir, Eigen::Index first,
                  Eigen::Index last, Vector* grad, Vector* hv, double* loss) {
  const auto h = static_cast<Eigen::Index>(m.hidden);
  const auto din = static_cast<Eigen::Index>(m.d_in);
  const MlpParams p = unpack(m, x);
  const double inv_n = 1.0 / static_cast<double>(m.inputs.rows());
  double total = 0.0;
  if (grad) grad->setZero(x.size());
  if (hv) hv->setZero(x.size());

  for (Eigen::Index s = first; s < last; ++s) {
    const Vector a = m.inputs.row(s).transpose();
    const Vector u = p.w1 * a + p.b1;
    const Vector act = u.array().tanh().matrix();
    const Vector dact = (1.0 - act.array().square()).matrix();
    const double r = p.w2.dot(act) + p.b2 - m.targets[s];
    total += r * r;

    const double dy = 2.0 * r;
    const Vector delta_s = dy * p.w2;
    const Vector delta_u = delta_s.cwiseProduct(dact);
    if (grad) {
      for (Eigen::Index j = 0; j < h; ++j) grad->segment(j * din, din) += delta_u[j] * a;
      grad->segment(h * din, h) += delta_u;
      grad->segment(h * din + h, h) += dy * act;
      (*grad)[h * din + 2 * h] += dy;
    }
    if (hv && dir) {
      const MlpParams q = unpack(m, *dir);
      const Vector ru = q.w1 * a + q.b1;
      const Vector ract = dact.cwiseProduct(ru);
      const double ry = q.w2.dot(act) + p.w2.dot(ract) + q.b2;
      const double rdy = 2.0 * ry;
      const Vector rdelta_s = rdy * p.w2 + dy * q.w2;
      const Vector rdelta_u =
          rdelta_s.cwiseProduct(dact) - 2.0 * delta_s.cwiseProduct(act).cwiseProduct(ract);
      for (Eigen::Index j = 0; j < h; ++j) hv->segment(j * din, din) += rdelta_u[j] * a;
      hv->segment(h * din, h) += rdelta_u;
      hv->segment(h * din + h, h) += rdy * act + dy * ract;
      (*hv)[h * din + 2 * h] += rdy;
    }
  }
  if (grad) *grad *= inv_n;
  if (hv) *hv *= inv_n;
  if (loss) *loss = total * inv_n;
}

}  // namespace

double estimate_hessian_norm(const OracleSet& oracle, const Vector& x, SeededRng& rng, int iterations) {
  Vector v = gaussian_unit_vector(rng, oracle.dim);
  double est = 0.0;
  for (int k = 0; k < iterations; ++k) {
    const Vector hv = oracle.hess_vec(x, v);
    const double n = hv.norm();
    est = std::max(est, n);
    if (n == 0.0) break;
    v = hv / n;
  }
  return est;
}

ProblemSpec make_mlp_regression(SeededRng& rng, std::size_t d_in, std::size_t d_hidden, std::size_t n,
                                MlpOptions opts) {
  if (d_in < 1 || d_hidden < 1 || n < 1) throw InvalidArgument("make_mlp_regression: sizes must be >= 1");
  if (!(opts.radius > 0.0)) throw InvalidArgument("make_mlp_regression: radius must be positive");

  auto data = std::make_shared<MlpData>();
  data->d_in = d_in;
  data->hidden = d_hidden;
  const auto rows = static_cast<Eigen::Index>(n);
  data->inputs.resize(rows, static_cast<Eigen::Index>(d_in));
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < data->inputs.cols(); ++j) data->inputs(i, j) = rng.normal();

  // Targets from a random teacher network of the same shape.
  const std::size_t d = data->dim();
  const Vector teacher = gaussian_vector(rng, d) / std::sqrt(static_cast<double>(d_in + 1));
  data->targets = Vector::Zero(rows);
  if (opts.target_scale != 0.0) {
    const MlpParams p = unpack(*data, teacher);
    for (Eigen::Index i = 0; i < rows; ++i) {
      const Vector act = (p.w1 * data->inputs.row(i).transpose() + p.b1).array().tanh().matrix();
      data->targets[i] = opts.target_scale * (p.w2.dot(act) + p.b2);
    }
  }

  ProblemSpec spec;
  spec.name = "mlp_regression";
  spec.dim = d;
  spec.n_components = n;
  spec.domain_radius = opts.radius;
  spec.constants_estimated = true;
  spec.generator_params = {{"d_in", static_cast<double>(d_in)},
                           {"d_hidden", static_cast<double>(d_hidden)},
                           {"n", static_cast<double>(n)},
                           {"target_scale", opts.target_scale},
                           {"R", opts.radius}};

  OracleSet& o = spec.oracle;
  o.dim = d;
  o.n_components = n;
  o.value = [data](const Vector& x) {
    double loss = 0.0;
    mlp_backprop(*data, x, nullptr, 0, data->inputs.rows(), nullptr, nullptr, &loss);
    return loss;
  };
  o.gradient = [data](const Vector& x) -> Vector {
    Vector g;
    mlp_backprop(*data, x, nullptr, 0, data->inputs.rows(), &g, nullptr, nullptr);
    return g;
  };
  o.hess_vec = [data](const Vector& x, const Vector& v) -> Vector {
    Vector hv;
    mlp_backprop(*data, x, &v, 0, data->inputs.rows(), nullptr, &hv, nullptr);
    return hv;
  };
  o.component_hess_vec = [data](std::size_t i, const Vector& x, const Vector& v) -> Vector {
    Vector hv;
    const auto s = static_cast<Eigen::Index>(i);
    mlp_backprop(*data, x, &v, s, s + 1, nullptr, &hv, nullptr);
    // mlp_backprop averages over all n samples; undo that for one component.
    return hv * static_cast<double>(data->inputs.rows());
  };

  // Empirical constants: per-component spectral norms (finite-sum form needs
  // every ||H_i|| <= L2) and Hessian differences at near and far pairs.
  SeededRng est = rng.split(0x4d4c50);
  double l2 = 0.0;
  double lip = 0.0;
  const double R = opts.radius;
  for (std::size_t k = 0; k < opts.constant_samples; ++k) {
    const Vector x = uniform_in_ball(est, d, R);
    for (std::size_t i = 0; i < n; ++i) {
      Vector v = gaussian_unit_vector(est, d);
      for (int it = 0; it < 30; ++it) {
        const Vector hv = o.component_hess_vec(i, x, v);
        const double nv = hv.norm();
        l2 = std::max(l2, nv);
        if (nv == 0.0) break;
        v = hv / nv;
      }
    }
    l2 = std::max(l2, estimate_hessian_norm(o, x, est, 30));

    for (double scale : {1.0, 0.1, 0.01}) {
      Vector y = x + scale * R * est.uniform() * gaussian_unit_vector(est, d);
      if (y.norm() > R) y *= R / y.norm();
      const double dist = (x - y).norm();
      if (dist == 0.0) continue;
      Vector v = gaussian_unit_vector(est, d);
      for (int it = 0; it < 30; ++it) {
        const Vector diff = o.hess_vec(x, v) - o.hess_vec(y, v);
        const double nd = diff.norm();
        lip = std::max(lip, nd / dist);
        if (nd == 0.0) break;
        v = diff / nd;
      }
    }
  }
  o.params.L2 = 2.0 * std::max(l2, 1e-12);
  o.params.L = 2.0 * std::max(lip, 1e-12);
  return spec;
}

// ---------------------------------------------------------------------------
// Rosenbrock

ProblemSpec make_rosenbrock(std::size_t d, double R) {
  if (d < 2) throw InvalidArgument("make_rosenbrock: d must be >= 2");
  if (R <= 0.0) R = 1.5 * std::sqrt(static_cast<double>(d)) + 1.0;
  const auto n = static_cast<Eigen::Index>(d);

  ProblemSpec spec;
  spec.name = "rosenbrock";
  spec.dim = d;
  spec.domain_radius = R;
  spec.generator_params = {{"d", static_cast<double>(d)}, {"R", R}};

  OracleSet& o = spec.oracle;
  o.dim = d;
  o.value = [](const Vector& x) {
    double f = 0.0;
    for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
      const double t = x[i + 1] - x[i] * x[i];
      f += 100.0 * t * t + (1.0 - x[i]) * (1.0 - x[i]);
    }
    return f;
  };
  o.gradient = [](const Vector& x) -> Vector {
    Vector g = Vector::Zero(x.size());
    for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
      const double t = x[i + 1] - x[i] * x[i];
      g[i] += -400.0 * x[i] * t - 2.0 * (1.0 - x[i]);
      g[i + 1] += 200.0 * t;
    }
    return g;
  };
  o.hess_vec = [](const Vector& x, const Vector& v) -> Vector {
    Vector hv = Vector::Zero(x.size());
    for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
      // Hessian block of term i on coordinates (i, i+1).
      const double hii = 1200.0 * x[i] * x[i] - 400.0 * x[i + 1] + 2.0;
      const double hij = -400.0 * x[i];
      hv[i] += hii * v[i] + hij * v[i + 1];
      hv[i + 1] += hij * v[i] + 200.0 * v[i + 1];
    }
    return hv;
  };
  o.params.L2 = 1200.0 * R * R + 1200.0 * R + 202.0;
  o.params.L = 2400.0 * R + 1200.0;
  spec.known_optimum = KnownOptimum{Vector::Ones(n), 0.0};
  return spec;
}

}  // namespace fastcubic
