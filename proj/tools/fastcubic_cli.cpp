// fastcubic command-line entry point: run, bench, solve-cubic, check.

#include <CLI11.hpp>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "fastcubic/bench.hpp"
#include "fastcubic/diagnostics.hpp"
#include "fastcubic/errors.hpp"
#include "fastcubic/json_io.hpp"
#include "fastcubic/optimizer.hpp"

namespace fc = fastcubic;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitCellError = 2;

struct Overrides {
  std::optional<double> eps;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> solver;
  std::optional<double> c_const;
  bool practical = false;
  std::optional<std::string> out;
};

void add_override_flags(CLI::App* app, Overrides& o) {
  app->add_option("--eps", o.eps, "Target accuracy (replaces the eps grid)");
  app->add_option("--seed", o.seed, "Seed (replaces the seed list)");
  app->add_option("--solver", o.solver, "Inner linear solver: agd or svrg");
  app->add_option("--c-const", o.c_const, "Stopping constant c");
  app->add_flag("--practical", o.practical, "Use c = 100 instead of the proven constant");
  app->add_option("--out", o.out, "Output directory");
}

void apply_overrides(fc::ExperimentConfig& cfg, const Overrides& o) {
  if (o.eps) cfg.eps_grid = {*o.eps};
  if (o.seed) cfg.seeds = {*o.seed};
  if (o.solver) cfg.solver = fc::solver_strategy_from_string(*o.solver);
  if (o.c_const) cfg.c_const = *o.c_const;
  if (o.practical) cfg.c_const = 100.0;
  if (o.out) cfg.output_dir = *o.out;
  cfg.validate();
}

void write_json(const fc::Json& j, const std::optional<std::string>& out_dir, const std::string& file) {
  if (!out_dir) {
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::filesystem::create_directories(*out_dir);
  std::ofstream(std::filesystem::path(*out_dir) / file) << j.dump(2) << '\n';
}

int cmd_run(const std::string& config_path, const std::string& problem, const std::string& method,
            const Overrides& o) {
  fc::ExperimentConfig cfg = fc::load_experiment_config(config_path);
  apply_overrides(cfg, o);
  const fc::ProblemEntry* entry = &cfg.problems.front();
  if (!problem.empty()) {
    entry = nullptr;
    for (const auto& p : cfg.problems)
      if (p.label == problem) entry = &p;
    if (entry == nullptr) throw fc::ConfigError("no problem labelled '" + problem + "' in config");
  }
  const std::string m = method.empty() ? cfg.methods.front() : method;
  if (m != "fastcubic" && m != "gd" && m != "exact_np") throw fc::ConfigError("unknown method '" + m + "'");
  const fc::CellOutcome cell = fc::run_cell(cfg, *entry, m, cfg.eps_grid.front(), cfg.seeds.front());
  write_json(cell.report, o.out, "report.json");
  std::cerr << fc::csv_header() << '\n' << fc::to_csv_line(cell.row) << '\n';
  return cell.row.status == "Error" ? kExitCellError : kExitOk;
}

int cmd_bench(const std::string& config_path, const Overrides& o) {
  fc::ExperimentConfig cfg = fc::load_experiment_config(config_path);
  apply_overrides(cfg, o);
  const auto rows = fc::run_matrix(cfg);
  std::cout << fc::summary_text(rows);
  try {
    const std::string scaling = fc::scaling_report(rows);
    std::cout << '\n' << scaling;
    std::ofstream(std::filesystem::path(cfg.output_dir) / "scaling.txt") << scaling;
  } catch (const fc::InvalidArgument&) {
    // Fewer than three eps values: no slopes to report.
  }
  for (const auto& r : rows)
    if (r.status == "Error") return kExitCellError;
  return kExitOk;
}

int cmd_solve_cubic(const std::string& path, double eps, std::uint64_t seed, const std::string& solver,
                    const std::optional<std::string>& out) {
  std::ifstream in(path);
  if (!in) throw fc::ConfigError("cannot open '" + path + "'");
  fc::Json j;
  try {
    in >> j;
  } catch (const fc::Json::exception& e) {
    throw fc::ConfigError(std::string("invalid JSON: ") + e.what());
  }
  const fc::DenseInstance inst = fc::instance_from_json(j);
  if (!(eps > 0.0)) throw fc::ConfigError("--eps must be positive");
  const fc::CubicSubproblem p = inst.subproblem();
  fc::SolverConfig sc;
  sc.kappa = fc::kappa_for(eps, p.L);
  sc.strategy = fc::solver_strategy_from_string(solver);
  fc::SeededRng rng(seed);
  const fc::CubicSolution sol = fc::fast_cubic_min(p, sc, rng);
  const fc::StepChoice step = fc::choose_step(p, sol);
  const fc::ExactSolution ex = fc::exact_solve(p);
  const double floor = -std::pow(eps, 1.5) / (800.0 * std::sqrt(p.L));
  fc::Json result{
      {"kappa", sc.kappa},
      {"solution", fc::to_json(sol)},
      {"step", {{"h", fc::vector_to_json(step.h)}, {"m", step.m}, {"from_eigvector", step.from_eigvector}}},
      {"exact", fc::to_json(ex)},
      {"comparison",
       {{"ratio_bound_met", step.m <= ex.m_star / 3000.0 || ex.m_star >= floor},
        {"m_ratio", ex.m_star != 0.0 ? step.m / ex.m_star : 0.0},
        {"lambda_error", sol.lambda - ex.lambda_star}}}};
  write_json(result, out, "solve-cubic.json");
  return kExitOk;
}

int cmd_check(std::uint64_t seed, int count, double eps) {
  if (count <= 0) throw fc::ConfigError("--count must be positive");
  if (!(eps > 0.0)) throw fc::ConfigError("--eps must be positive");
  fc::SeededRng rng(seed);
  const fc::InstanceKind kinds[] = {fc::InstanceKind::Easy, fc::InstanceKind::Hard, fc::InstanceKind::NearHard,
                                    fc::InstanceKind::ZeroGradient, fc::InstanceKind::Convex};
  int schedule_fail = 0, ratio_fail = 0, errors = 0;
  for (int k = 0; k < count; ++k) {
    const std::size_t d = 2 + rng.index(19);
    const fc::DenseInstance inst = fc::random_instance(rng, d, kinds[k % 5]);
    try {
      const fc::CubicSubproblem p = inst.subproblem();
      fc::SolverConfig sc;
      sc.kappa = fc::kappa_for(eps, p.L);
      const fc::CubicSolution sol = fc::fast_cubic_min(p, sc, rng);
      const fc::StepChoice step = fc::choose_step(p, sol);
      const fc::ExactSolution ex = fc::exact_solve(p);
      const double lmax = ex.H.selfadjointView<Eigen::Lower>().eigenvalues().maxCoeff();
      const fc::ScheduleReport sched = fc::check_schedule(sol, ex.lambda_min, lmax, sc.kappa);
      if (!sched.ok()) {
        ++schedule_fail;
        std::cout << "instance " << k << " (" << fc::to_string(inst.kind) << "): " << sched.violations.front().what
                  << '\n';
      }
      const double floor = -std::pow(eps, 1.5) / (800.0 * std::sqrt(p.L));
      if (!(step.m <= ex.m_star / 3000.0 || ex.m_star >= floor)) {
        ++ratio_fail;
        std::cout << "instance " << k << " (" << fc::to_string(inst.kind) << "): m(h') = " << step.m
                  << ", m* = " << ex.m_star << '\n';
      }
    } catch (const fc::Error& e) {
      ++errors;
      std::cout << "instance " << k << " (" << fc::to_string(inst.kind) << "): error: " << e.what() << '\n';
    }
  }
  std::cout << (schedule_fail == 0 ? "PASS" : "FAIL") << " lambda schedule invariants (" << schedule_fail << "/"
            << count << " failing)\n";
  std::cout << (ratio_fail == 0 ? "PASS" : "FAIL") << " approximation ratio vs exact solve (" << ratio_fail << "/"
            << count << " failing)\n";
  std::cout << (errors == 0 ? "PASS" : "FAIL") << " no solver errors (" << errors << "/" << count << ")\n";
  return schedule_fail + ratio_fail + errors == 0 ? kExitOk : kExitCellError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Second-order nonconvex optimization with cubic-regularized Newton steps"};
  app.require_subcommand(1);

  std::string config;
  std::string problem, method;
  Overrides run_o, bench_o;
  auto* run = app.add_subcommand("run", "Run one (problem, method, eps, seed) cell and print its report");
  run->add_option("--config", config, "Experiment config JSON")->required();
  run->add_option("--problem", problem, "Problem label (default: first in config)");
  run->add_option("--method", method, "fastcubic, gd or exact_np (default: first in config)");
  add_override_flags(run, run_o);

  auto* bench = app.add_subcommand("bench", "Run the full experiment matrix");
  bench->add_option("--config", config, "Experiment config JSON")->required();
  add_override_flags(bench, bench_o);

  double eps = 1e-3;
  std::uint64_t seed = 0;
  std::string solver = "agd";
  std::optional<std::string> out;
  auto* solve = app.add_subcommand("solve-cubic", "Solve one cubic subproblem and compare with the exact solver");
  solve->add_option("--config", config, "Subproblem JSON {g, H, L, L2}")->required();
  solve->add_option("--eps", eps, "Accuracy that sets kappa = sqrt(900 / (eps L))");
  solve->add_option("--seed", seed, "Seed");
  solve->add_option("--solver", solver, "agd or svrg");
  solve->add_option("--out", out, "Output directory");

  int count = 50;
  auto* check = app.add_subcommand("check", "Invariant suite on small random subproblems");
  check->add_option("--seed", seed, "Seed");
  check->add_option("--count", count, "Number of instances");
  check->add_option("--eps", eps, "Accuracy that sets kappa");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run) return cmd_run(config, problem, method, run_o);
    if (*bench) return cmd_bench(config, bench_o);
    if (*solve) return cmd_solve_cubic(config, eps, seed, solver, out);
    if (*check) return cmd_check(seed, count, eps);
  } catch (const fc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitCellError;
  }
  return kExitOk;
}
