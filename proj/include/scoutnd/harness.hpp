#pragma once

#include <iosfwd>
#include <string>

#include "scoutnd/benchmarks.hpp"
#include "scoutnd/optimizer.hpp"
#include "scoutnd/trace.hpp"

namespace scoutnd {

enum class CostMetric {
  kEvalIndex,    // raw evaluation count, any level
  kHfCost,       // cumulative charged HF-equivalent cost
  kHfOnlyCount,  // highest-fidelity calls only
};

// Smallest budget (per the chosen metric) at which the trace's running best
// feasible value comes within eps_f of f_star; +infinity if never.
double evals_to_accuracy(const EvalTrace& trace, double f_star, double eps_f,
                         CostMetric metric = CostMetric::kEvalIndex);

struct ProfileProblem {
  std::string id;
  int dim = 0;
  double f_star = 0.0;
  double eps_f = 0.1;
};

struct ProfileInput {
  std::vector<ProfileProblem> problems;
  std::vector<std::string> solvers;
  // t[p][s]: budget for solver s to reach accuracy on problem p (> 0 or +inf).
  std::vector<std::vector<double>> t;

  void validate() const;
};

// Moré-Wild data profile: d_s(alpha) = |{p : t_ps / (d_p + 1) <= alpha}| / |P|,
// evaluated on the given alpha grid. Returns one row per solver.
std::vector<Vec> data_profile(const ProfileInput& input, const Vec& alphas);

std::string profile_to_csv(const ProfileInput& input, const Vec& alphas,
                           const std::vector<Vec>& profile);

// Reads and validates an externally produced trace (documented CSV schema);
// best-feasible values are recomputed, never trusted.
EvalTrace ingest_external_trace(std::istream& in);
EvalTrace ingest_external_trace_file(const std::string& path);

struct SuiteMethod {
  std::string name;
  RunConfig config;  // seed is overwritten per run
};

struct SuiteConfig {
  std::vector<int> dims = {2, 4, 8, 16, 32};
  std::vector<SphereConstraint> cases = {SphereConstraint::kBoundary,
                                         SphereConstraint::kInterior};
  int seeds = 5;
  std::uint64_t seed0 = 1;
  std::vector<SuiteMethod> methods;
  double eps_f = 0.1;
  double noise_std = std::sqrt(0.1);
  double lf_cost_weight = 0.1;
  double mu0_value = 1.0;
  double sigma0 = 1.0;
  std::string out_dir;  // empty = keep traces in memory only
};

struct SuiteRun {
  std::string problem_id;
  std::string method;
  int dim = 0;
  SphereConstraint constraint = SphereConstraint::kBoundary;
  std::uint64_t seed = 0;
  bool failed = false;
  std::string error;
  double t_evals = 0.0;    // evals_to_accuracy, raw-count metric
  double t_hf_cost = 0.0;  // same, HF-equivalent cost metric
  double final_f = 0.0;    // noiseless f at returned mu
  double max_constraint = 0.0;
  double hf_cost = 0.0;
  std::string trace_file;
  RunResult result;
};

struct SuiteResult {
  ProfileInput by_evals;    // t measured in raw evaluations
  ProfileInput by_hf_cost;  // t measured in HF-equivalent cost
  std::vector<SuiteRun> runs;
};

// Runs every (method x dim x case x seed) sphere benchmark, persists traces
// when out_dir is set, and assembles both t-matrices. Individual run
// failures are recorded and the suite continues.
SuiteResult benchmark_suite(const SuiteConfig& config);

// Default method line-up: Scout-Nd (baseline + QMC, 50 HF samples per step)
// and MF-Scout-Nd (50 LF + 10 HF per step).
std::vector<SuiteMethod> default_suite_methods(double budget_hf_cost);

// (cumulative HF cost, f(mu) - f_star) series from a run's step history,
// for error-vs-evaluations plots.
std::vector<std::pair<double, double>> error_curve(const RunResult& result,
                                                   const ProblemSpec& problem);

}  // namespace scoutnd
