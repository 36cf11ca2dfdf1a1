#include "scoutnd/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

namespace scoutnd {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double evals_to_accuracy(const EvalTrace& trace, double f_star, double eps_f,
                         CostMetric metric) {
  if (!(eps_f > 0.0)) throw ValueError("evals_to_accuracy: eps_f must be positive");
  int hf_level = 0;
  for (const TraceRecord& rec : trace.records()) hf_level = std::max(hf_level, rec.level);
  std::uint64_t hf_calls = 0;
  for (const TraceRecord& rec : trace.records()) {
    if (rec.level == hf_level) ++hf_calls;
    if (rec.best_feasible - f_star <= eps_f) {
      switch (metric) {
        case CostMetric::kEvalIndex: return static_cast<double>(rec.eval_index);
        case CostMetric::kHfCost: return rec.hf_cost;
        case CostMetric::kHfOnlyCount: return static_cast<double>(hf_calls);
      }
    }
  }
  return kInf;
}

void ProfileInput::validate() const {
  if (problems.empty()) throw ValueError("profile: empty problem set");
  if (solvers.empty()) throw ValueError("profile: empty solver set");
  if (t.size() != problems.size()) {
    throw DimensionError("profile: t matrix rows must match problem count");
  }
  for (const auto& row : t) {
    if (row.size() != solvers.size()) {
      throw DimensionError("profile: t matrix columns must match solver count");
    }
    for (double v : row) {
      if (!(v > 0.0)) throw ValueError("profile: t entries must be positive or +inf");
    }
  }
}

std::vector<Vec> data_profile(const ProfileInput& input, const Vec& alphas) {
  input.validate();
  const double n_problems = static_cast<double>(input.problems.size());
  std::vector<Vec> profile(input.solvers.size(), Vec(alphas.size(), 0.0));
  for (size_t s = 0; s < input.solvers.size(); ++s) {
    for (size_t a = 0; a < alphas.size(); ++a) {
      std::size_t solved = 0;
      for (size_t p = 0; p < input.problems.size(); ++p) {
        double normalized = input.t[p][s] / (input.problems[p].dim + 1.0);
        if (normalized <= alphas[a]) ++solved;
      }
      profile[s][a] = static_cast<double>(solved) / n_problems;
    }
  }
  return profile;
}

std::string profile_to_csv(const ProfileInput& input, const Vec& alphas,
                           const std::vector<Vec>& profile) {
  std::ostringstream out;
  out << "alpha,solver,ds\n";
  for (size_t s = 0; s < input.solvers.size(); ++s) {
    for (size_t a = 0; a < alphas.size(); ++a) {
      out << format_double(alphas[a]) << ',' << input.solvers[s] << ','
          << format_double(profile[s][a]) << '\n';
    }
  }
  return out.str();
}

EvalTrace ingest_external_trace(std::istream& in) { return EvalTrace::from_csv(in); }

EvalTrace ingest_external_trace_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("trace: cannot open " + path);
  try {
    return EvalTrace::from_csv(in);
  } catch (const IoError& e) {
    throw IoError(path + ": " + e.what());
  }
}

std::vector<SuiteMethod> default_suite_methods(double budget_hf_cost) {
  RunConfig scout;
  scout.estimator = Estimator::kBaselineQmc;
  scout.samples_per_level = {50};
  scout.schedule = geometric_schedule({1.0}, 10.0, 4);
  scout.max_hf_cost = budget_hf_cost;

  RunConfig mf = scout;
  mf.estimator = Estimator::kMultifidelity;
  mf.samples_per_level = {50, 10};

  return {{"scout-nd", scout}, {"mf-scout-nd", mf}};
}

SuiteResult benchmark_suite(const SuiteConfig& config) {
  if (config.methods.empty()) throw ValueError("suite: no methods configured");
  if (config.dims.empty() || config.cases.empty() || config.seeds < 1) {
    throw ValueError("suite: empty problem grid");
  }
  if (!config.out_dir.empty()) {
    std::filesystem::create_directories(config.out_dir);
  }

  SuiteResult suite;
  ProfileInput& by_evals = suite.by_evals;
  ProfileInput& by_cost = suite.by_hf_cost;
  for (const SuiteMethod& m : config.methods) {
    by_evals.solvers.push_back(m.name);
    by_cost.solvers.push_back(m.name);
  }

  for (int dim : config.dims) {
    for (SphereConstraint which : config.cases) {
      for (int rep = 0; rep < config.seeds; ++rep) {
        const int case_index = which == SphereConstraint::kBoundary ? 1 : 2;
        const std::uint64_t seed =
            derive_seed(config.seed0, dim, case_index, rep);
        std::string problem_id = "sphere_case" + std::to_string(case_index) +
                                 "_d" + std::to_string(dim) + "_seed" +
                                 std::to_string(rep);

        const double f_star = which == SphereConstraint::kBoundary ? 0.5 : 0.0;
        ProfileProblem meta{problem_id, dim, f_star, config.eps_f};
        by_evals.problems.push_back(meta);
        by_cost.problems.push_back(meta);
        by_evals.t.emplace_back();
        by_cost.t.emplace_back();

        for (const SuiteMethod& method : config.methods) {
          SuiteRun run_record;
          run_record.problem_id = problem_id;
          run_record.method = method.name;
          run_record.dim = dim;
          run_record.constraint = which;
          run_record.seed = seed;
          try {
            SphereCase sphere;
            sphere.dim = dim;
            sphere.constraint = which;
            sphere.noise_std = config.noise_std;
            sphere.lf_cost_weight = config.lf_cost_weight;
            ProblemSpec problem = make_sphere(sphere);

            RunConfig rc = method.config;
            rc.seed = seed;
            GaussianPolicy policy0 =
                make_policy(Vec(dim, config.mu0_value), config.sigma0);
            RunResult result = run(problem, policy0, rc);

            run_record.t_evals = evals_to_accuracy(
                result.trace, meta.f_star, config.eps_f, CostMetric::kEvalIndex);
            run_record.t_hf_cost = evals_to_accuracy(
                result.trace, meta.f_star, config.eps_f, CostMetric::kHfCost);
            EvalResult at_mu = problem.true_eval(result.final_mu);
            run_record.final_f = at_mu.f;
            run_record.max_constraint =
                at_mu.c.empty() ? 0.0 : *std::max_element(at_mu.c.begin(), at_mu.c.end());
            run_record.hf_cost = result.hf_cost;

            if (!config.out_dir.empty()) {
              std::string name = "trace_" + method.name + "_" + problem_id + ".csv";
              std::string path =
                  (std::filesystem::path(config.out_dir) / name).string();
              std::ofstream out(path, std::ios::binary | std::ios::trunc);
              if (!out) throw IoError("suite: cannot write " + path);
              result.trace.write_csv(out);
              run_record.trace_file = path;
            }
            run_record.result = std::move(result);
          } catch (const std::exception& e) {
            run_record.failed = true;
            run_record.error = e.what();
            run_record.t_evals = kInf;
            run_record.t_hf_cost = kInf;
          }
          by_evals.t.back().push_back(run_record.t_evals);
          by_cost.t.back().push_back(run_record.t_hf_cost);
          suite.runs.push_back(std::move(run_record));
        }
      }
    }
  }
  return suite;
}

std::vector<std::pair<double, double>> error_curve(const RunResult& result,
                                                   const ProblemSpec& problem) {
  if (!problem.true_eval || !problem.known_optimum) {
    throw ValueError("error_curve: problem has no noiseless reference");
  }
  std::vector<std::pair<double, double>> curve;
  curve.reserve(result.theta_history.size());
  for (const ThetaSnapshot& snap : result.theta_history) {
    double f_mu = problem.true_eval(snap.mu).f;
    curve.emplace_back(snap.cum_hf_cost, f_mu - *problem.known_optimum);
  }
  return curve;
}

}  // namespace scoutnd
