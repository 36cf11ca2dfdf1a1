#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "scoutnd/harness.hpp"

using namespace scoutnd;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

EvalTrace trace_from_best(const std::vector<double>& fs, double c_value = -1.0) {
  EvalTrace t;
  for (double f : fs) t.append(1, 1.0, f, {c_value});
  return t;
}

}  // namespace

TEST_CASE("evals_to_accuracy walks the running best") {
  EvalTrace immediate = trace_from_best({0.05});
  CHECK(evals_to_accuracy(immediate, 0.0, 0.1) == 1.0);

  EvalTrace never = trace_from_best({5.0, 4.0, 3.0});
  CHECK(evals_to_accuracy(never, 0.0, 0.1) == kInf);

  EvalTrace staircase = trace_from_best({1.0, 0.3, 0.12, 0.09});
  CHECK(evals_to_accuracy(staircase, 0.0, 0.1) == 4.0);
}

TEST_CASE("evals_to_accuracy respects feasibility and metrics") {
  EvalTrace t;
  t.append(1, 0.1, 0.01, {0.5});   // close but infeasible
  t.append(2, 1.0, 0.05, {-0.2});  // feasible, qualifies
  CHECK(evals_to_accuracy(t, 0.0, 0.1, CostMetric::kEvalIndex) == 2.0);
  CHECK(evals_to_accuracy(t, 0.0, 0.1, CostMetric::kHfCost) ==
        doctest::Approx(1.1));
  CHECK(evals_to_accuracy(t, 0.0, 0.1, CostMetric::kHfOnlyCount) == 1.0);
  CHECK_THROWS_AS(evals_to_accuracy(t, 0.0, 0.0), ValueError);
}

TEST_CASE("evals_to_accuracy is monotone in eps_f") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> unif(0.0, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> fs;
    for (int i = 0; i < 20; ++i) fs.push_back(unif(rng));
    EvalTrace t = trace_from_best(fs);
    double e1 = unif(rng) + 1e-3, e2 = e1 + unif(rng);
    double t1 = evals_to_accuracy(t, 0.0, e1);
    double t2 = evals_to_accuracy(t, 0.0, e2);
    CHECK(t2 <= t1);
  }
}

TEST_CASE("best-feasible recomputation is idempotent") {
  EvalTrace t;
  t.append(1, 1.0, 3.0, {-1.0});
  t.append(1, 1.0, 1.0, {0.5});
  t.append(1, 1.0, 2.0, {-1.0});
  std::string before = t.to_csv();
  CHECK(t.records()[1].best_feasible == 3.0);  // infeasible record does not count
  CHECK(t.records()[2].best_feasible == 2.0);
  t.recompute_best();
  t.recompute_best();
  CHECK(t.records()[2].best_feasible == 2.0);
  CHECK(t.to_csv() == before);
}

TEST_CASE("data profile: exact counting on the worked examples") {
  ProfileInput all_inf{{{"p1", 2, 0.0, 0.1}, {"p2", 4, 0.0, 0.1}},
                       {"s"},
                       {{kInf}, {kInf}}};
  Vec alphas = {0.5, 1.0, 10.0, 1000.0};
  auto d_all_inf = data_profile(all_inf, alphas);
  for (double v : d_all_inf[0]) CHECK(v == 0.0);

  ProfileInput single{{{"p", 2, 0.0, 0.1}}, {"s"}, {{6.0}}};
  auto d_single = data_profile(single, {1.9, 2.0, 2.1});
  CHECK(d_single[0][0] == 0.0);
  CHECK(d_single[0][1] == 1.0);  // 6 / (2+1) = 2
  CHECK(d_single[0][2] == 1.0);

  ProfileInput two{{{"a", 2, 0.0, 0.1}, {"b", 2, 0.0, 0.1}},
                   {"s"},
                   {{6.0}, {kInf}}};
  auto d_two = data_profile(two, {2.0, 5.0});
  CHECK(d_two[0][0] == 0.5);
  CHECK(d_two[0][1] == 0.5);
}

TEST_CASE("data profile: monotone step functions matching a brute-force recount") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    int n_problems = 1 + static_cast<int>(rng() % 12);
    int n_solvers = 1 + static_cast<int>(rng() % 4);
    ProfileInput input;
    std::vector<int> dims;
    for (int p = 0; p < n_problems; ++p) {
      int dim = 1 + static_cast<int>(rng() % 32);
      input.problems.push_back({"p" + std::to_string(p), dim, 0.0, 0.1});
      dims.push_back(dim);
    }
    for (int s = 0; s < n_solvers; ++s) input.solvers.push_back("s" + std::to_string(s));
    input.t.assign(n_problems, std::vector<double>(n_solvers));
    for (auto& row : input.t) {
      for (double& v : row) {
        v = unif(rng) < 0.2 ? kInf : 1.0 + std::floor(unif(rng) * 500.0);
      }
    }
    Vec alphas;
    for (int a = 0; a < 100; ++a) alphas.push_back(unif(rng) * 200.0);
    auto profile = data_profile(input, alphas);
    for (int s = 0; s < n_solvers; ++s) {
      std::vector<double> column;
      for (int p = 0; p < n_problems; ++p) column.push_back(input.t[p][s]);
      for (size_t a = 0; a < alphas.size(); ++a) {
        CHECK(profile[s][a] == oracles::brute_force_profile(dims, column, alphas[a]));
        CHECK(profile[s][a] >= 0.0);
        CHECK(profile[s][a] <= 1.0);
      }
    }
    // monotone along a sorted grid
    Vec sorted = alphas;
    std::sort(sorted.begin(), sorted.end());
    auto mono = data_profile(input, sorted);
    for (int s = 0; s < n_solvers; ++s) {
      for (size_t a = 1; a < sorted.size(); ++a) CHECK(mono[s][a] >= mono[s][a - 1]);
    }
  }
  CHECK_THROWS_AS(data_profile(ProfileInput{}, {1.0}), ValueError);
}

TEST_CASE("trace ingestion validates the schema with row numbers") {
  std::istringstream empty("eval_index,level,hf_cost,f,c1\n");
  CHECK_THROWS_WITH_AS(ingest_external_trace(empty), "trace: no records", IoError);

  std::istringstream out_of_order(
      "eval_index,level,hf_cost,f,c1\n"
      "1,1,1,5.0,-1\n"
      "3,1,2,4.0,-1\n"
      "2,1,3,3.0,-1\n");
  try {
    ingest_external_trace(out_of_order);
    FAIL("expected IoError");
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find("row 4") != std::string::npos);
  }

  std::istringstream valid(
      "eval_index,level,hf_cost,f,c1\n"
      "1,1,1,5.0,-1\n"
      "2,1,2,1.0,0.5\n"
      "3,1,3,2.0,-1\n");
  EvalTrace t = ingest_external_trace(valid);
  REQUIRE(t.size() == 3);
  CHECK(t.records()[0].best_feasible == 5.0);
  CHECK(t.records()[1].best_feasible == 5.0);  // infeasible row ignored
  CHECK(t.records()[2].best_feasible == 2.0);

  std::istringstream bad_header("index,level\n1,1\n");
  CHECK_THROWS_AS(ingest_external_trace(bad_header), IoError);
  std::istringstream bad_field(
      "eval_index,level,hf_cost,f,c1\n"
      "1,1,1,abc,-1\n");
  CHECK_THROWS_AS(ingest_external_trace(bad_field), IoError);
  std::istringstream nothing("");
  CHECK_THROWS_AS(ingest_external_trace(nothing), IoError);
}

TEST_CASE("trace CSV round-trips through ingestion") {
  EvalTrace t;
  t.append(1, 0.1, 1.25, {-0.5});
  t.append(2, 1.0, 0.75, {0.25});
  t.append(2, 1.0, 0.5, {-0.125});
  std::istringstream in(t.to_csv());
  EvalTrace back = ingest_external_trace(in);
  CHECK(back.to_csv() == t.to_csv());
}

TEST_CASE("benchmark suite: single-problem grid") {
  SuiteConfig config;
  config.dims = {2};
  config.cases = {SphereConstraint::kBoundary};
  config.seeds = 1;
  config.methods = default_suite_methods(2000.0);
  config.methods.resize(1);
  config.out_dir = (std::filesystem::temp_directory_path() / "scoutnd_suite_one").string();

  SuiteResult result = benchmark_suite(config);
  CHECK(result.by_evals.problems.size() == 1);
  CHECK(result.by_evals.solvers.size() == 1);
  CHECK(result.runs.size() == 1);
  CHECK_FALSE(result.runs[0].failed);
  CHECK(std::filesystem::exists(result.runs[0].trace_file));
  // deterministic trace names from problem id and seed index
  CHECK(result.runs[0].trace_file.find("trace_scout-nd_sphere_case1_d2_seed0.csv") !=
        std::string::npos);
  std::filesystem::remove_all(config.out_dir);
}

TEST_CASE("benchmark suite: the paper grid yields |P| = 50") {
  SuiteConfig config;
  config.seeds = 5;  // dims {2,4,8,16,32} x 2 cases x 5 seeds
  config.methods = default_suite_methods(120.0);  // tiny budget, grid-shape test
  SuiteResult result = benchmark_suite(config);
  CHECK(result.by_evals.problems.size() == 50);
  CHECK(result.by_hf_cost.problems.size() == 50);
  for (const auto& row : result.by_evals.t) CHECK(row.size() == 2);
  CHECK(result.runs.size() == 100);
}

TEST_CASE("benchmark suite records failures and keeps going") {
  SuiteConfig config;
  config.dims = {1, 2};  // d = 1 cannot host the boundary constraint
  config.cases = {SphereConstraint::kBoundary};
  config.seeds = 1;
  config.methods = default_suite_methods(500.0);
  config.methods.resize(1);
  SuiteResult result = benchmark_suite(config);
  REQUIRE(result.runs.size() == 2);
  CHECK(result.runs[0].failed);
  CHECK(result.runs[0].t_evals == kInf);
  CHECK_FALSE(result.runs[1].failed);
}

TEST_CASE("error curve pairs cumulative cost with the noiseless gap") {
  SphereCase c;
  c.dim = 2;
  ProblemSpec problem = make_sphere(c);
  RunConfig rc;
  rc.estimator = Estimator::kBaselineQmc;
  rc.samples_per_level = {50};
  rc.schedule = geometric_schedule({1.0}, 10.0, 2);
  rc.max_hf_cost = 1000;
  RunResult r = run(problem, GaussianPolicy{Vec(2, 1.0), Vec(2, 0.0)}, rc);
  auto curve = error_curve(r, problem);
  REQUIRE(curve.size() == r.theta_history.size());
  CHECK(curve.front().first == doctest::Approx(50.0));
  for (size_t i = 1; i < curve.size(); ++i) CHECK(curve[i].first > curve[i - 1].first);
}
