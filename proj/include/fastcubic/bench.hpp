#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fastcubic/json_io.hpp"
#include "fastcubic/linear_solver.hpp"
#include "fastcubic/problems.hpp"

namespace fastcubic {

struct ProblemEntry {
  std::string name;
  std::string label;  // unique within a config; defaults to name
  std::map<std::string, double> params;
};

struct ExperimentConfig {
  std::vector<ProblemEntry> problems;
  std::vector<std::string> methods;  // fastcubic, gd, exact_np
  std::vector<double> eps_grid;
  std::vector<std::uint64_t> seeds;
  SolverStrategy solver = SolverStrategy::AGD;
  double c_const = 2.4e6;
  int max_outer = 1000;
  long long gd_max_iter = 200000;
  std::string output_dir = "results";
  // false writes wall_ms = 0 so repeated runs give byte-identical files.
  bool record_wall_time = true;

  void validate() const;
};

/// Parses the experiment JSON. Unknown keys, unknown problem names or
/// parameters, and invalid values raise ConfigError.
ExperimentConfig parse_experiment_config(const Json& j);
ExperimentConfig load_experiment_config(const std::string& path);

/// Allowed parameters and defaults for a problem family.
const std::map<std::string, double>& problem_defaults(const std::string& name);

/// Instantiates a problem; `rng` feeds the random generators.
ProblemSpec build_problem(const ProblemEntry& entry, SeededRng& rng);

/// x0_scale = 0 picks the family's canonical start (the saddle for
/// saddle_escape, the origin otherwise); otherwise a random direction of
/// that length.
Vector initial_point(const ProblemEntry& entry, const ProblemSpec& spec, SeededRng& rng);

struct ResultRow {
  std::string problem;
  std::string method;
  double eps = 0.0;
  std::uint64_t seed = 0;
  long long outer_iters = 0;
  long long hv_count = 0;
  long long grad_count = 0;
  double final_f = 0.0;
  double final_grad_norm = 0.0;
  std::optional<double> final_lambda_min;
  double wall_ms = 0.0;
  std::string status;

  bool operator==(const ResultRow&) const = default;
};

struct CellOutcome {
  ResultRow row;
  Json report;
};

/// One (problem, method, eps, seed) cell. Random streams derive from the
/// seed: split(1) builds the problem, split(2) draws x0, split(3) drives the
/// algorithm. Errors become status=Error rows.
CellOutcome run_cell(const ExperimentConfig& cfg, const ProblemEntry& entry, const std::string& method,
                     double eps, std::uint64_t seed);

/// Reads FASTCUBIC_THREADS; unset, invalid, or 0 means serial.
int threads_from_env();

/// Runs every cell (in parallel when threads > 1), sorts rows by problem,
/// method, eps, seed, and writes results.csv, report-<cell>.json and
/// summary.txt under cfg.output_dir.
std::vector<ResultRow> run_matrix(const ExperimentConfig& cfg, int threads = -1);

/// Shortest decimal string that parses back to the same double.
std::string format_double(double x);

std::string csv_header();
std::string to_csv_line(const ResultRow& r);
std::string to_csv(const std::vector<ResultRow>& rows);
std::vector<ResultRow> parse_csv(const std::string& text);

/// Per (problem, method, eps) medians of hv_count and outer_iters over seeds.
std::string summary_text(const std::vector<ResultRow>& rows);

struct SlopeFit {
  std::string problem;
  std::string method;
  std::string metric;
  double slope = 0.0;
  int points = 0;
};

/// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Slopes of log(count) against log(1/eps), using per-eps medians over
/// non-error rows (gd: converged rows only). Metrics: fastcubic and exact_np
/// outer_iters and hv_count, gd grad_count. Throws InvalidArgument when a
/// (problem, method) group has fewer than 3 distinct eps values.
std::vector<SlopeFit> scaling_fits(const std::vector<ResultRow>& rows);
std::string scaling_report(const std::vector<ResultRow>& rows);

}  // namespace fastcubic
