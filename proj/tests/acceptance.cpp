// Acceptance suite: every release criterion with its tolerance pinned in
// code. Prints one PASS/FAIL line per criterion; exit code is the number of
// failures.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "scoutnd/benchmarks.hpp"
#include "scoutnd/cli.hpp"
#include "scoutnd/config.hpp"
#include "scoutnd/external_sim.hpp"
#include "scoutnd/gradest.hpp"
#include "scoutnd/harness.hpp"
#include "scoutnd/optimizer.hpp"

using namespace scoutnd;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int number, const std::string& name, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %d: %s — %s\n", pass ? "PASS" : "FAIL", number,
              name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

void run_criterion(int number, const std::string& name,
                   const std::function<std::pair<bool, std::string>()>& body) {
  try {
    auto [pass, detail] = body();
    report(number, name, pass, detail);
  } catch (const std::exception& e) {
    report(number, name, false, std::string("exception: ") + e.what());
  }
}

ProblemSpec unconstrained_sphere(int dim) {
  SphereCase c;
  c.dim = dim;
  c.constraint = SphereConstraint::kInterior;
  return make_sphere(c);
}

struct BlockStats {
  Vec mean, se;
};

BlockStats stats_over(const std::vector<GradEstimate>& estimates) {
  const int d = estimates.front().grad.dim();
  const int n = static_cast<int>(estimates.size());
  BlockStats out{Vec(2 * d, 0.0), Vec(2 * d, 0.0)};
  for (const GradEstimate& e : estimates) {
    for (int j = 0; j < d; ++j) {
      out.mean[j] += e.grad.d_mu[j];
      out.mean[d + j] += e.grad.d_log_sigma[j];
    }
  }
  for (double& v : out.mean) v /= n;
  for (const GradEstimate& e : estimates) {
    for (int j = 0; j < d; ++j) {
      double a = e.grad.d_mu[j] - out.mean[j];
      double b = e.grad.d_log_sigma[j] - out.mean[d + j];
      out.se[j] += a * a;
      out.se[d + j] += b * b;
    }
  }
  for (double& v : out.se) v = std::sqrt(v / (n - 1) / n);
  return out;
}

std::pair<bool, std::string> criterion_analytic_oracle() {
  const int n_batches = 200, s_count = 1024;
  const double sigma = std::exp(1.0);
  bool pass = true;
  double worst_z = 0.0;
  for (int d : {2, 8}) {
    ProblemSpec problem = unconstrained_sphere(d);
    ProblemSpec twin = problem;  // identical coupled levels for the telescope
    twin.levels = {problem.levels[1], problem.levels[1]};
    twin.costs = {0.5, 1.0};
    twin.counter.reset();
    twin.ensure_counter();
    GaussianPolicy theta{Vec(d, 1.0), Vec(d, 1.0)};
    const Vec lambda = {0.0};

    std::vector<GradEstimate> plain, baseline, mf;
    for (int rep = 0; rep < n_batches; ++rep) {
      SampleBatch b = make_batch(SampleScheme::kPseudo, s_count, d, 1,
                                 derive_seed(101, d, 0, rep));
      plain.push_back(sf_plain(theta, problem, 2, lambda, b, {2, nullptr}));
      baseline.push_back(sf_baseline(theta, problem, 2, lambda, b, {2, nullptr}));
      SampleBatch b1 = make_batch(SampleScheme::kPseudo, s_count, d, 1,
                                  derive_seed(103, d, 1, rep));
      SampleBatch b2 = make_batch(SampleScheme::kPseudo, s_count, d, 1,
                                  derive_seed(103, d, 2, rep));
      mf.push_back(sf_multifidelity(theta, twin, lambda, {b1, b2}, {2, nullptr}));
    }
    for (const auto* estimates : {&plain, &baseline, &mf}) {
      BlockStats st = stats_over(*estimates);
      for (int j = 0; j < d; ++j) {
        double z_mu = std::abs(st.mean[j] - 2.0) / st.se[j];
        double z_ls = std::abs(st.mean[d + j] - 2.0 * sigma * sigma) / st.se[d + j];
        worst_z = std::max({worst_z, z_mu, z_ls});
        pass = pass && z_mu <= 3.0 && z_ls <= 3.0;
      }
    }
  }
  std::ostringstream detail;
  detail << "plain/baseline/MF means vs (2mu, 2sigma^2) over " << n_batches
         << " batches of S=" << s_count << ", d in {2,8}; worst |z| = " << worst_z
         << " (limit 3)";
  return {pass, detail.str()};
}

std::pair<bool, std::string> criterion_variance_reduction() {
  const int d = 32, s_count = 128, reps = 10;
  ProblemSpec problem = unconstrained_sphere(d);
  GaussianPolicy theta{Vec(d, 1.0), Vec(d, 1.0)};
  const Vec lambda = {0.0};
  std::vector<GradEstimate> plain, reduced;
  for (int rep = 0; rep < reps; ++rep) {
    plain.push_back(sf_plain(theta, problem, 2, lambda,
                             make_batch(SampleScheme::kPseudo, s_count, d, 1,
                                        derive_seed(7, d, 0, rep))));
    reduced.push_back(sf_baseline(theta, problem, 2, lambda,
                                  make_batch(SampleScheme::kQmc, s_count, d, 1,
                                             derive_seed(7, d, 1, rep))));
  }
  double ratio = variance_report(plain).max_component /
                 variance_report(reduced).max_component;
  std::ostringstream detail;
  detail << "max-component variance ratio plain+pseudo : baseline+QMC at d=32, S=128, "
         << reps << " reps = " << ratio << " (needs >= 5)";
  return {ratio >= 5.0, detail.str()};
}

RunConfig default_run_config(std::uint64_t seed) {
  RunConfig rc;
  rc.estimator = Estimator::kBaselineQmc;
  rc.samples_per_level = {50};
  rc.schedule = geometric_schedule({1.0}, 10.0, 4);
  rc.max_hf_cost = 5e4;
  rc.seed = seed;
  rc.workers = 2;
  return rc;
}

std::pair<bool, std::string> criterion_case1() {
  std::ostringstream detail;
  bool pass = true;
  for (int d : {2, 8}) {
    int good = 0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      SphereCase c;
      c.dim = d;
      c.constraint = SphereConstraint::kBoundary;
      ProblemSpec problem = make_sphere(c);
      RunResult r = run(problem, GaussianPolicy{Vec(d, 1.0), Vec(d, 0.0)},
                        default_run_config(seed));
      EvalResult at_mu = problem.true_eval(r.final_mu);
      if (std::abs(at_mu.f - 0.5) <= 0.1 && at_mu.c[0] <= 0.05 &&
          r.hf_cost <= 5e4 + 50) {
        ++good;
      }
    }
    pass = pass && good >= 4;
    detail << "d=" << d << ": " << good << "/5 seeds within |f-0.5|<=0.1, maxC<=0.05; ";
  }
  detail << "budget 5e4 HF-equivalent (needs >= 4/5 each)";
  return {pass, detail.str()};
}

std::pair<bool, std::string> criterion_case2() {
  int good = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    SphereCase c;
    c.dim = 8;
    c.constraint = SphereConstraint::kInterior;
    ProblemSpec problem = make_sphere(c);
    RunResult r = run(problem, GaussianPolicy{Vec(8, 1.0), Vec(8, 0.0)},
                      default_run_config(seed));
    if (problem.true_eval(r.final_mu).f <= 0.1) ++good;
  }
  std::ostringstream detail;
  detail << "d=8: " << good << "/5 seeds with f(mu) <= 0.1 (needs >= 4/5)";
  return {good >= 4, detail.str()};
}

std::pair<bool, std::string> criterion_mf_efficiency() {
  std::vector<double> t_scout, t_mf;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    SphereCase c;
    c.dim = 8;
    c.constraint = SphereConstraint::kBoundary;
    ProblemSpec p1 = make_sphere(c);
    ProblemSpec p2 = make_sphere(c);
    RunConfig scout = default_run_config(seed);
    RunConfig mf = scout;
    mf.estimator = Estimator::kMultifidelity;
    mf.samples_per_level = {50, 10};
    GaussianPolicy p0{Vec(8, 1.0), Vec(8, 0.0)};
    t_scout.push_back(evals_to_accuracy(run(p1, p0, scout).trace, 0.5, 0.1,
                                        CostMetric::kHfCost));
    t_mf.push_back(evals_to_accuracy(run(p2, p0, mf).trace, 0.5, 0.1,
                                     CostMetric::kHfCost));
  }
  double med_scout = oracles::median(t_scout);
  double med_mf = oracles::median(t_mf);
  std::ostringstream detail;
  detail << "median HF-equivalent cost to eps_f=0.1 on case 1, d=8: MF-Scout-Nd "
         << med_mf << " vs Scout-Nd " << med_scout << " (needs MF lower)";
  return {med_mf < med_scout, detail.str()};
}

std::pair<bool, std::string> criterion_data_profile() {
  std::mt19937_64 rng(2718);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double inf = std::numeric_limits<double>::infinity();
  int mismatches = 0, comparisons = 0;
  for (int trial = 0; trial < 20; ++trial) {
    int n_problems = 1 + static_cast<int>(rng() % 16);
    int n_solvers = 1 + static_cast<int>(rng() % 5);
    ProfileInput input;
    std::vector<int> dims;
    for (int p = 0; p < n_problems; ++p) {
      int dim = 1 + static_cast<int>(rng() % 40);
      input.problems.push_back({"p" + std::to_string(p), dim, 0.0, 0.1});
      dims.push_back(dim);
    }
    for (int s = 0; s < n_solvers; ++s) input.solvers.push_back("s" + std::to_string(s));
    input.t.assign(n_problems, std::vector<double>(n_solvers));
    for (auto& row : input.t) {
      for (double& v : row) v = unif(rng) < 0.25 ? inf : 1.0 + std::floor(unif(rng) * 999.0);
    }
    Vec alphas;
    for (int a = 0; a < 100; ++a) alphas.push_back(unif(rng) * 300.0);
    auto profile = data_profile(input, alphas);
    for (int s = 0; s < n_solvers; ++s) {
      std::vector<double> column;
      for (int p = 0; p < n_problems; ++p) column.push_back(input.t[p][s]);
      for (size_t a = 0; a < alphas.size(); ++a) {
        ++comparisons;
        if (profile[s][a] != oracles::brute_force_profile(dims, column, alphas[a])) {
          ++mismatches;
        }
      }
    }
  }
  std::ostringstream detail;
  detail << mismatches << " mismatches against the brute-force recount over "
         << comparisons << " (profile, alpha) pairs on 20 synthetic inputs (needs 0)";
  return {mismatches == 0, detail.str()};
}

std::pair<bool, std::string> criterion_baseline_exactness() {
  ProblemSpec p;
  p.dim = 3;
  p.constraint_count = 0;
  p.noise_dim = 0;
  p.levels.push_back([](const Vec&, const Vec&, int) {
    return EvalResult{4.75, {}};
  });
  p.costs = {1.0};
  p.ensure_counter();
  GaussianPolicy theta{Vec(3, 0.5), Vec(3, 0.0)};
  bool pass = true;
  for (int s_count : {2, 16, 128}) {
    GradEstimate est = sf_baseline(
        theta, p, 1, {}, make_batch(SampleScheme::kPseudo, s_count, 3, 0, s_count));
    for (double g : est.grad.d_mu) pass = pass && g == 0.0;
    for (double g : est.grad.d_log_sigma) pass = pass && g == 0.0;
  }
  return {pass, "constant objective gives the exact zero vector for S in {2,16,128}"};
}

std::pair<bool, std::string> criterion_bench_determinism() {
  Config config = Config::parse_string(
      "[bench]\ndims = 2\ncases = 1,2\nseeds = 2\nseed0 = 11\nbudget_hf_cost = 2000\n"
      "[run]\nsamples_per_level = 25\nworkers = 2\n",
      "acceptance");
  fs::path out1 = fs::temp_directory_path() / "scoutnd_acc_bench1";
  fs::path out2 = fs::temp_directory_path() / "scoutnd_acc_bench2";
  fs::remove_all(out1);
  fs::remove_all(out2);
  if (cli::cmd_bench(config, out1.string()) != cli::kExitOk ||
      cli::cmd_bench(config, out2.string()) != cli::kExitOk) {
    return {false, "cmd_bench did not complete"};
  }
  auto slurp = [](const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  int compared = 0;
  bool identical = true;
  for (const auto& entry : fs::directory_iterator(out1 / "traces")) {
    fs::path twin = out2 / "traces" / entry.path().filename();
    identical = identical && fs::exists(twin) && slurp(entry.path()) == slurp(twin);
    ++compared;
  }
  fs::remove_all(out1);
  fs::remove_all(out2);
  std::ostringstream detail;
  detail << compared << " trace files byte-identical across two cmd_bench executions";
  return {identical && compared > 0, detail.str()};
}

std::pair<bool, std::string> criterion_protocol_round_trip() {
  SphereCase c;
  c.dim = 4;
  c.constraint = SphereConstraint::kInterior;
  ProblemSpec in_process = make_sphere(c);

  ExternalSimSpec spec;
  spec.level_commands = {
      "python3 " SCOUTND_FIXTURE_DIR "/ref_simulator.py --mode sphere --case 2",
      "python3 " SCOUTND_FIXTURE_DIR "/ref_simulator.py --mode sphere --case 2"};
  ExternalSimulator sim(spec);

  const int n_evals = 1000;
  auto rows = draw_pseudo(5, n_evals, 909);
  int exact = 0;
  for (int i = 0; i < n_evals; ++i) {
    Vec x(4);
    for (int j = 0; j < 4; ++j) x[j] = 6.0 * rows[i][j] - 3.0;
    Vec b = in_process.noise_sampler({rows[i][4]});
    int level = 1 + (i % 2);
    EvalResult want = in_process.levels[level - 1](x, b, 0);
    EvalResult got = sim.evaluate(level, x, b);
    if (got.f == want.f && got.c == want.c) ++exact;
  }
  std::ostringstream detail;
  detail << exact << "/" << n_evals
         << " evaluations bit-identical to in-process, zero protocol errors";
  return {exact == n_evals, detail.str()};
}

}  // namespace

int main() {
  std::printf("scoutnd acceptance suite\n");
  run_criterion(1, "analytic gradient oracle", criterion_analytic_oracle);
  run_criterion(2, "variance reduction >= 5x at d=32", criterion_variance_reduction);
  run_criterion(3, "constrained convergence, case 1", criterion_case1);
  run_criterion(4, "constrained convergence, case 2", criterion_case2);
  run_criterion(5, "multi-fidelity efficiency", criterion_mf_efficiency);
  run_criterion(6, "data-profile correctness", criterion_data_profile);
  run_criterion(7, "baseline exactness on constant objectives", criterion_baseline_exactness);
  run_criterion(8, "bench determinism (byte-identical traces)", criterion_bench_determinism);
  run_criterion(9, "external protocol round trip", criterion_protocol_round_trip);
  if (failures == 0) {
    std::printf("all 9 criteria passed\n");
  } else {
    std::printf("%d criteria FAILED\n", failures);
  }
  return failures;
}
