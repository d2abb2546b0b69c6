#include "fastcubic/bench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include "fastcubic/errors.hpp"
#include "fastcubic/optimizer.hpp"

namespace fastcubic {
namespace {

namespace fs = std::filesystem;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const std::map<std::string, std::map<std::string, double>>& registry() {
  static const std::map<std::string, std::map<std::string, double>> r{
      {"quartic_quadratic",
       {{"d", 20}, {"rho", 1.0}, {"R", 3.0}, {"spectrum_lo", -1.0}, {"spectrum_hi", 1.0}, {"b_norm", 1.0},
        {"rotate", 1.0}, {"x0_scale", 0.5}}},
      {"saddle_escape", {{"gamma", 1.0}, {"d", 2}, {"x0_scale", 0.0}}},
      {"sigmoid_sum", {{"d", 10}, {"n", 50}, {"data_scale", 1.0}, {"x0_scale", 0.5}}},
      {"mlp_regression",
       {{"d_in", 3}, {"d_hidden", 4}, {"n", 30}, {"target_scale", 1.0}, {"radius", 3.0}, {"x0_scale", 0.5}}},
      {"rosenbrock", {{"d", 2}, {"R", -1.0}, {"x0_scale", 0.0}}},
  };
  return r;
}

std::size_t as_size(double v, const std::string& what) {
  if (!(v >= 1.0) || v != std::floor(v)) throw ConfigError(what + " must be a positive integer");
  return static_cast<std::size_t>(v);
}

void reject_unknown(const Json& j, const std::set<std::string>& known, const std::string& where) {
  for (const auto& item : j.items()) {
    if (!known.count(item.key())) throw ConfigError("unknown key '" + item.key() + "' in " + where);
  }
}

double json_number(const Json& j, const std::string& what) {
  if (!j.is_number()) throw ConfigError(what + " must be a number");
  return j.get<double>();
}

std::string cell_name(const ResultRow& r) {
  return r.problem + "-" + r.method + "-eps" + format_double(r.eps) + "-seed" + std::to_string(r.seed);
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double parse_double(const std::string& s) {
  double x = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw ConfigError("bad number '" + s + "' in csv");
  return x;
}

long long parse_int(const std::string& s) {
  long long x = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw ConfigError("bad integer '" + s + "' in csv");
  return x;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (problems.empty()) throw ConfigError("config: problems must be non-empty");
  if (methods.empty()) throw ConfigError("config: methods must be non-empty");
  if (eps_grid.empty()) throw ConfigError("config: eps_grid must be non-empty");
  if (seeds.empty()) throw ConfigError("config: seeds must be non-empty");
  for (double e : eps_grid)
    if (!(e > 0.0)) throw ConfigError("config: eps values must be positive");
  for (const auto& m : methods)
    if (m != "fastcubic" && m != "gd" && m != "exact_np") throw ConfigError("config: unknown method '" + m + "'");
  if (!(c_const >= 1.0)) throw ConfigError("config: c_const must be at least 1");
  if (max_outer <= 0) throw ConfigError("config: max_outer must be positive");
  if (gd_max_iter <= 0) throw ConfigError("config: gd_max_iter must be positive");
  std::set<std::string> labels;
  for (const auto& p : problems) {
    if (!labels.insert(p.label).second) throw ConfigError("config: duplicate problem label '" + p.label + "'");
    if (p.label.find_first_of(",/\\ \n") != std::string::npos)
      throw ConfigError("config: problem label '" + p.label + "' contains a separator character");
  }
}

const std::map<std::string, double>& problem_defaults(const std::string& name) {
  const auto it = registry().find(name);
  if (it == registry().end()) throw ConfigError("unknown problem '" + name + "'");
  return it->second;
}

ExperimentConfig parse_experiment_config(const Json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(j,
                 {"problems", "methods", "eps_grid", "seeds", "solver", "c_const", "practical", "max_outer",
                  "gd_max_iter", "output_dir", "timing"},
                 "config");
  ExperimentConfig cfg;
  try {
    for (const Json& p : j.at("problems")) {
      if (!p.is_object()) throw ConfigError("each problem must be an object");
      reject_unknown(p, {"name", "label", "params"}, "problem entry");
      ProblemEntry e;
      e.name = p.at("name").get<std::string>();
      e.label = p.contains("label") ? p.at("label").get<std::string>() : e.name;
      e.params = problem_defaults(e.name);
      if (p.contains("params")) {
        for (const auto& item : p.at("params").items()) {
          if (!e.params.count(item.key()))
            throw ConfigError("unknown parameter '" + item.key() + "' for problem '" + e.name + "'");
          e.params[item.key()] = json_number(item.value(), item.key());
        }
      }
      cfg.problems.push_back(std::move(e));
    }
    for (const Json& m : j.at("methods")) cfg.methods.push_back(m.get<std::string>());
    for (const Json& e : j.at("eps_grid")) cfg.eps_grid.push_back(json_number(e, "eps_grid entry"));
    for (const Json& s : j.at("seeds")) {
      if (!s.is_number_integer() || s.get<long long>() < 0) throw ConfigError("seeds must be non-negative integers");
      cfg.seeds.push_back(s.get<std::uint64_t>());
    }
    if (j.contains("solver")) cfg.solver = solver_strategy_from_string(j.at("solver").get<std::string>());
    if (j.contains("c_const")) cfg.c_const = json_number(j.at("c_const"), "c_const");
    if (j.contains("practical") && j.at("practical").get<bool>()) cfg.c_const = 100.0;
    if (j.contains("max_outer")) cfg.max_outer = j.at("max_outer").get<int>();
    if (j.contains("gd_max_iter")) cfg.gd_max_iter = j.at("gd_max_iter").get<long long>();
    if (j.contains("output_dir")) cfg.output_dir = j.at("output_dir").get<std::string>();
    if (j.contains("timing")) {
      const auto t = j.at("timing").get<std::string>();
      if (t != "wall" && t != "none") throw ConfigError("timing must be 'wall' or 'none'");
      cfg.record_wall_time = t == "wall";
    }
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  Json j;
  try {
    in >> j;
  } catch (const Json::exception& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_experiment_config(j);
}

ProblemSpec build_problem(const ProblemEntry& entry, SeededRng& rng) {
  std::map<std::string, double> p = problem_defaults(entry.name);
  for (const auto& [k, v] : entry.params) {
    if (!p.count(k)) throw ConfigError("unknown parameter '" + k + "' for problem '" + entry.name + "'");
    p[k] = v;
  }
  if (entry.name == "quartic_quadratic") {
    const std::size_t d = as_size(p["d"], "d");
    std::vector<double> spectrum(d);
    for (std::size_t i = 0; i < d; ++i) {
      const double t = d == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(d - 1);
      spectrum[i] = p["spectrum_hi"] + t * (p["spectrum_lo"] - p["spectrum_hi"]);
    }
    QuarticQuadraticOptions opts;
    opts.b_norm = p["b_norm"];
    opts.rotate = p["rotate"] != 0.0;
    return make_quartic_quadratic(rng, d, spectrum, p["rho"], p["R"], opts);
  }
  if (entry.name == "saddle_escape") return make_saddle_escape(p["gamma"], as_size(p["d"], "d"));
  if (entry.name == "sigmoid_sum")
    return make_sigmoid_sum(rng, as_size(p["d"], "d"), as_size(p["n"], "n"), p["data_scale"]);
  if (entry.name == "mlp_regression") {
    MlpOptions opts;
    opts.target_scale = p["target_scale"];
    opts.radius = p["radius"];
    return make_mlp_regression(rng, as_size(p["d_in"], "d_in"), as_size(p["d_hidden"], "d_hidden"),
                               as_size(p["n"], "n"), opts);
  }
  if (entry.name == "rosenbrock") return make_rosenbrock(as_size(p["d"], "d"), p["R"]);
  throw ConfigError("unknown problem '" + entry.name + "'");
}

Vector initial_point(const ProblemEntry& entry, const ProblemSpec& spec, SeededRng& rng) {
  const auto it = entry.params.find("x0_scale");
  const double scale = it != entry.params.end() ? it->second : problem_defaults(entry.name).at("x0_scale");
  if (scale == 0.0) {
    if (spec.known_saddle) return spec.known_saddle->point;
    return Vector::Zero(static_cast<Eigen::Index>(spec.dim));
  }
  return scale * gaussian_unit_vector(rng, spec.dim);
}

CellOutcome run_cell(const ExperimentConfig& cfg, const ProblemEntry& entry, const std::string& method,
                     double eps, std::uint64_t seed) {
  CellOutcome out;
  ResultRow& row = out.row;
  row.problem = entry.label;
  row.method = method;
  row.eps = eps;
  row.seed = seed;
  try {
    const SeededRng root(seed);
    SeededRng problem_rng = root.split(1);
    SeededRng x0_rng = root.split(2);
    SeededRng algo_rng = root.split(3);
    const ProblemSpec spec = build_problem(entry, problem_rng);
    const Vector x0 = initial_point(entry, spec, x0_rng);

    RunResult res;
    if (method == "gd") {
      res = gradient_descent(spec.oracle, x0, eps, cfg.gd_max_iter, spec.domain_radius);
    } else {
      FastCubicConfig fc;
      fc.eps = eps;
      fc.c_const = cfg.c_const;
      fc.max_outer = cfg.max_outer;
      fc.strategy = cfg.solver;
      fc.seed = algo_rng.next_u64();
      fc.domain_radius = spec.domain_radius;
      res = method == "fastcubic" ? fast_cubic(spec.oracle, x0, fc) : exact_np_cubic(spec.oracle, x0, fc);
    }
    RunReport& rep = res.report;
    if (!cfg.record_wall_time) rep.wall_ms = 0.0;
    row.outer_iters = rep.outer_iters;
    row.hv_count = rep.hv_calls;
    row.grad_count = rep.grad_calls;
    row.final_f = rep.final_f;
    row.final_grad_norm = rep.final_grad_norm;
    row.final_lambda_min = rep.final_lambda_min;
    row.wall_ms = rep.wall_ms;
    row.status = to_string(rep.status);
    out.report = to_json(rep);
    out.report["problem"] = entry.label;
    out.report["problem_name"] = entry.name;
    out.report["params"] = entry.params;
    out.report["dim"] = spec.dim;
    out.report["L"] = spec.oracle.params.L;
    out.report["L2"] = spec.oracle.params.L2;
    out.report["constants_estimated"] = spec.constants_estimated;
    out.report["domain_radius"] = std::isfinite(spec.domain_radius) ? Json(spec.domain_radius) : Json(nullptr);
  } catch (const std::exception& e) {
    row.final_f = kNaN;
    row.final_grad_norm = kNaN;
    row.final_lambda_min.reset();
    row.status = to_string(RunStatus::Error);
    out.report = Json{{"problem", entry.label}, {"method", method}, {"status", row.status}, {"error", e.what()}};
  }
  out.report["eps"] = eps;
  out.report["seed"] = seed;
  return out;
}

int threads_from_env() {
  const char* s = std::getenv("FASTCUBIC_THREADS");
  if (s == nullptr) return 0;
  char* end = nullptr;
  const long v = std::strtol(s, &end, 10);
  if (end == s || *end != '\0' || v < 0) return 0;
  return static_cast<int>(std::min(v, 256L));
}

std::vector<ResultRow> run_matrix(const ExperimentConfig& cfg, int threads) {
  cfg.validate();
  if (threads < 0) threads = threads_from_env();

  struct Cell {
    const ProblemEntry* entry;
    std::string method;
    double eps;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  for (const auto& p : cfg.problems)
    for (const auto& m : cfg.methods)
      for (double e : cfg.eps_grid)
        for (std::uint64_t s : cfg.seeds) cells.push_back({&p, m, e, s});

  std::vector<CellOutcome> outcomes(cells.size());
  auto work = [&](std::size_t k) {
    outcomes[k] = run_cell(cfg, *cells[k].entry, cells[k].method, cells[k].eps, cells[k].seed);
  };
  if (threads <= 1) {
    for (std::size_t k = 0; k < cells.size(); ++k) work(k);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t k = next++; k < cells.size(); k = next++) work(k);
      });
    }
    for (auto& th : pool) th.join();
  }

  std::sort(outcomes.begin(), outcomes.end(), [](const CellOutcome& a, const CellOutcome& b) {
    return std::tie(a.row.problem, a.row.method, a.row.eps, a.row.seed) <
           std::tie(b.row.problem, b.row.method, b.row.eps, b.row.seed);
  });
  std::vector<ResultRow> rows;
  rows.reserve(outcomes.size());
  for (const auto& o : outcomes) rows.push_back(o.row);

  const fs::path dir(cfg.output_dir);
  fs::create_directories(dir);
  std::ofstream(dir / "results.csv", std::ios::binary) << to_csv(rows);
  for (const auto& o : outcomes) {
    std::ofstream(dir / ("report-" + cell_name(o.row) + ".json"), std::ios::binary) << o.report.dump(2) << '\n';
  }
  std::ofstream(dir / "summary.txt", std::ios::binary) << summary_text(rows);
  return rows;
}

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::string csv_header() {
  return "problem,method,eps,seed,outer_iters,hv_count,grad_count,final_f,final_grad_norm,final_lambda_min,wall_ms,"
         "status";
}

std::string to_csv_line(const ResultRow& r) {
  std::ostringstream os;
  os << r.problem << ',' << r.method << ',' << format_double(r.eps) << ',' << r.seed << ',' << r.outer_iters << ','
     << r.hv_count << ',' << r.grad_count << ',' << format_double(r.final_f) << ','
     << format_double(r.final_grad_norm) << ',' << (r.final_lambda_min ? format_double(*r.final_lambda_min) : "")
     << ',' << format_double(r.wall_ms) << ',' << r.status;
  return os.str();
}

std::string to_csv(const std::vector<ResultRow>& rows) {
  std::string s = csv_header() + "\n";
  for (const auto& r : rows) s += to_csv_line(r) + "\n";
  return s;
}

std::vector<ResultRow> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != csv_header()) throw ConfigError("csv: missing or unexpected header");
  std::vector<ResultRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::size_t start = 0;
    for (;;) {
      const std::size_t comma = line.find(',', start);
      f.push_back(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (f.size() != 12) throw ConfigError("csv: expected 12 fields, got " + std::to_string(f.size()));
    ResultRow r;
    r.problem = f[0];
    r.method = f[1];
    r.eps = parse_double(f[2]);
    r.seed = static_cast<std::uint64_t>(parse_int(f[3]));
    r.outer_iters = parse_int(f[4]);
    r.hv_count = parse_int(f[5]);
    r.grad_count = parse_int(f[6]);
    r.final_f = parse_double(f[7]);
    r.final_grad_norm = parse_double(f[8]);
    if (!f[9].empty()) r.final_lambda_min = parse_double(f[9]);
    r.wall_ms = parse_double(f[10]);
    r.status = f[11];
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string summary_text(const std::vector<ResultRow>& rows) {
  std::map<std::tuple<std::string, std::string, double>, std::vector<const ResultRow*>> groups;
  for (const auto& r : rows) groups[{r.problem, r.method, r.eps}].push_back(&r);
  std::ostringstream os;
  os << "problem method eps seeds errors median_hv_count median_outer_iters\n";
  for (const auto& [key, members] : groups) {
    std::vector<double> hv, outer;
    int errors = 0;
    for (const ResultRow* r : members) {
      if (r->status == "Error") {
        ++errors;
        continue;
      }
      hv.push_back(static_cast<double>(r->hv_count));
      outer.push_back(static_cast<double>(r->outer_iters));
    }
    os << std::get<0>(key) << ' ' << std::get<1>(key) << ' ' << format_double(std::get<2>(key)) << ' '
       << members.size() << ' ' << errors << ' ' << (hv.empty() ? "-" : format_double(median(hv))) << ' '
       << (outer.empty() ? "-" : format_double(median(outer))) << '\n';
  }
  return os.str();
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("fit_slope: need at least two paired points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (!(sxx > 0.0)) throw InvalidArgument("fit_slope: x values are all equal");
  return sxy / sxx;
}

std::vector<SlopeFit> scaling_fits(const std::vector<ResultRow>& rows) {
  std::map<std::pair<std::string, std::string>, std::map<double, std::vector<const ResultRow*>>> groups;
  for (const auto& r : rows) groups[{r.problem, r.method}][r.eps].push_back(&r);

  std::vector<SlopeFit> fits;
  for (const auto& [key, by_eps] : groups) {
    if (by_eps.size() < 3) {
      throw InvalidArgument("scaling_report: " + key.first + "/" + key.second + " has " +
                            std::to_string(by_eps.size()) + " eps values, need at least 3");
    }
    const std::string& method = key.second;
    std::vector<std::string> metrics =
        method == "gd" ? std::vector<std::string>{"grad_count"} : std::vector<std::string>{"outer_iters", "hv_count"};
    for (const auto& metric : metrics) {
      std::vector<double> xs, ys;
      for (const auto& [eps, members] : by_eps) {
        std::vector<double> vals;
        for (const ResultRow* r : members) {
          if (r->status == "Error") continue;
          if (method == "gd" && r->status != "Converged") continue;
          const long long c = metric == "grad_count" ? r->grad_count
                              : metric == "hv_count" ? r->hv_count
                                                     : r->outer_iters;
          if (c > 0) vals.push_back(static_cast<double>(c));
        }
        if (vals.empty()) continue;
        xs.push_back(std::log(1.0 / eps));
        ys.push_back(std::log(median(vals)));
      }
      SlopeFit f{key.first, method, metric, kNaN, static_cast<int>(xs.size())};
      if (xs.size() >= 2) f.slope = fit_slope(xs, ys);
      fits.push_back(f);
    }
  }
  return fits;
}

std::string scaling_report(const std::vector<ResultRow>& rows) {
  std::ostringstream os;
  os << "problem method metric points slope_vs_log_inv_eps\n";
  for (const SlopeFit& f : scaling_fits(rows)) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", f.slope);
    os << f.problem << ' ' << f.method << ' ' << f.metric << ' ' << f.points << ' '
       << (std::isfinite(f.slope) ? buf : "-") << '\n';
  }
  return os.str();
}

}  // namespace fastcubic
