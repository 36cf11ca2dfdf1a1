#include "scoutnd/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "scoutnd/benchmarks.hpp"
#include "scoutnd/external_sim.hpp"
#include "scoutnd/gradest.hpp"
#include "scoutnd/harness.hpp"
#include "scoutnd/math.hpp"
#include "scoutnd/svg.hpp"

namespace scoutnd::cli {

namespace fs = std::filesystem;

namespace {

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  if (!out.good()) throw IoError("write failed for " + path.string());
}

fs::path prepare_out_dir(const Config& config, const std::string& out_dir) {
  int version = config.get_int("meta", "version");
  if (version != 1) {
    throw ConfigError("meta.version " + std::to_string(version) +
                      " is not supported (expected 1)");
  }
  fs::path dir(out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + out_dir);
  write_file(dir / "resolved.cfg", config.resolved_dump());
  return dir;
}

std::string vec_to_string(const Vec& v) {
  std::string out = "[";
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += format_double(v[i]);
  }
  return out + "]";
}

int resolve_workers(int configured) {
  if (configured > 0) return configured;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

Estimator estimator_from_config_name(const std::string& name) {
  if (name == "scout-nd") return Estimator::kBaselineQmc;
  if (name == "mf-scout-nd") return Estimator::kMultifidelity;
  return estimator_from_name(name);
}

std::string history_csv(const RunResult& result) {
  std::ostringstream out;
  size_t dim = result.final_mu.size();
  out << "round,inner_step,cum_evals,cum_hf_cost,batch_mean_L";
  for (size_t j = 1; j <= dim; ++j) out << ",mu" << j;
  for (size_t j = 1; j <= dim; ++j) out << ",sigma" << j;
  out << '\n';
  for (const ThetaSnapshot& s : result.theta_history) {
    out << s.round << ',' << s.inner_step << ',' << s.cum_evals << ','
        << format_double(s.cum_hf_cost) << ',' << format_double(s.batch_mean_L);
    for (double v : s.mu) out << ',' << format_double(v);
    for (double v : s.sigma) out << ',' << format_double(v);
    out << '\n';
  }
  return out.str();
}

int map_exception_to_exit(const char* where) {
  try {
    throw;
  } catch (const ConfigError& e) {
    std::cerr << where << ": " << e.what() << '\n';
    return kExitConfig;
  } catch (const IoError& e) {
    std::cerr << where << ": " << e.what() << '\n';
    return kExitIo;
  } catch (const Error& e) {
    std::cerr << where << ": " << e.what() << '\n';
    return kExitRun;
  } catch (const std::exception& e) {
    std::cerr << where << ": internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}

struct ManifestRow {
  std::string solver;
  std::string problem_id;
  int dim = 0;
  double f_star = 0.0;
  double eps_f = 0.1;
  std::string trace_path;
};

std::vector<ManifestRow> read_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw IoError("manifest is empty: " + path.string());
  if (line != "solver,problem_id,dim,f_star,eps_f,trace_path" &&
      line != "solver,problem_id,dim,f_star,eps_f,trace_path\r") {
    throw IoError("manifest has unexpected header: " + line);
  }
  std::vector<ManifestRow> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
      if (ch == ',') {
        fields.push_back(cur);
        cur.clear();
      } else if (ch != '\r') {
        cur.push_back(ch);
      }
    }
    fields.push_back(cur);
    if (fields.size() != 6) {
      throw IoError("manifest row " + std::to_string(line_no) + ": expected 6 fields");
    }
    ManifestRow row;
    row.solver = fields[0];
    row.problem_id = fields[1];
    row.dim = static_cast<int>(parse_double(fields[2]));
    row.f_star = parse_double(fields[3]);
    row.eps_f = parse_double(fields[4]);
    row.trace_path = fields[5];
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw IoError("manifest has no rows: " + path.string());
  return rows;
}

}  // namespace

ProblemSpec problem_from_config(const Config& config) {
  std::string kind = config.get_string("problem", "kind");
  if (kind == "sphere") {
    SphereCase sphere;
    sphere.dim = config.get_int("problem", "dim");
    int case_index = config.get_int("problem", "case");
    if (case_index != 1 && case_index != 2) {
      throw ConfigError("problem.case must be 1 or 2, got " + std::to_string(case_index));
    }
    sphere.constraint = case_index == 1 ? SphereConstraint::kBoundary
                                        : SphereConstraint::kInterior;
    sphere.noise_std = config.get_double("problem", "noise_std");
    sphere.lf_scale = config.get_double("problem", "lf_scale");
    sphere.lf_cost_weight = config.get_double("problem", "lf_cost_weight");
    return make_sphere(sphere);
  }
  if (kind == "external") {
    ExternalSimSpec spec;
    for (const char* key : {"command1", "command2", "command3", "command4"}) {
      std::string cmd = config.get_string("external", key);
      if (cmd.empty()) break;
      spec.level_commands.push_back(cmd);
    }
    if (spec.level_commands.empty()) {
      throw ConfigError("missing required key 'external.command1' for an external problem");
    }
    spec.timeout_ms = config.get_int("external", "timeout_ms");
    spec.retries = config.get_int("external", "retries");
    int dim = config.get_int("problem", "dim");
    int n_constraints = config.get_int("external", "constraints");
    int noise_dim = config.get_int("external", "noise_dim");
    double noise_std = config.get_double("external", "noise_std");
    Vec costs = config.get_doubles("external", "costs");
    if (costs.size() != spec.level_commands.size()) {
      throw ConfigError("external.costs needs one entry per level command");
    }
    NoiseSampler sampler;
    if (noise_dim > 0) {
      sampler = [noise_dim, noise_std](const Vec& u) {
        Vec b(noise_dim);
        for (int j = 0; j < noise_dim; ++j) {
          double uc = std::clamp(u[j], 1e-12, 1.0 - 1e-12);
          b[j] = noise_std > 0.0 ? noise_std * inverse_normal_cdf(uc) : u[j];
        }
        return b;
      };
    }
    int workers = resolve_workers(config.get_int("run", "workers"));
    return make_external_problem(spec, dim, n_constraints, noise_dim,
                                 std::move(sampler), std::move(costs), workers);
  }
  throw ConfigError("problem.kind must be 'sphere' or 'external', got '" + kind + "'");
}

RunConfig run_config_from_config(const Config& config, const ProblemSpec& problem) {
  RunConfig rc;
  rc.estimator = estimator_from_config_name(config.get_string("run", "estimator"));
  rc.samples_per_level = config.get_ints("run", "samples_per_level");
  if (rc.estimator == Estimator::kMultifidelity &&
      static_cast<int>(rc.samples_per_level.size()) != problem.num_levels()) {
    throw ConfigError("run.samples_per_level needs one entry per fidelity level (" +
                      std::to_string(problem.num_levels()) + ") for the multifidelity estimator");
  }
  rc.adam.lr_mu = config.get_double("adam", "lr_mu");
  rc.adam.lr_log_sigma = config.get_double("adam", "lr_log_sigma");
  rc.adam.beta1 = config.get_double("adam", "beta1");
  rc.adam.beta2 = config.get_double("adam", "beta2");
  rc.adam.eps = config.get_double("adam", "eps");
  rc.eps_theta = config.get_double("run", "eps_theta");
  rc.eps_sigma = config.get_double("run", "eps_sigma");
  rc.max_inner_steps = config.get_int("run", "max_inner_steps");
  rc.max_outer_rounds = config.get_int("run", "max_outer_rounds");
  rc.max_total_evals = config.get_u64("run", "max_total_evals");
  rc.max_hf_cost = config.get_double("run", "max_hf_cost");
  rc.seed = config.get_u64("run", "seed");
  rc.workers = resolve_workers(config.get_int("run", "workers"));

  if (problem.constraint_count > 0) {
    Vec lambda0 = config.get_doubles("penalty", "lambda0");
    if (lambda0.size() == 1) lambda0.assign(problem.constraint_count, lambda0[0]);
    if (static_cast<int>(lambda0.size()) != problem.constraint_count) {
      throw ConfigError("penalty.lambda0 needs 1 or " +
                        std::to_string(problem.constraint_count) + " entries");
    }
    rc.schedule = geometric_schedule(lambda0, config.get_double("penalty", "ratio"),
                                     config.get_int("penalty", "rounds"));
  }
  return rc;
}

GaussianPolicy policy0_from_config(const Config& config, int dim) {
  Vec mu0 = config.get_doubles("init", "mu0");
  if (mu0.size() == 1) mu0.assign(dim, mu0[0]);
  if (static_cast<int>(mu0.size()) != dim) {
    throw ConfigError("init.mu0 needs 1 or " + std::to_string(dim) + " entries");
  }
  return make_policy(mu0, config.get_double("init", "sigma0"));
}

int cmd_optimize(const Config& config, const std::string& out_dir, int verbosity) {
  try {
    fs::path dir = prepare_out_dir(config, out_dir);
    ProblemSpec problem = problem_from_config(config);
    RunConfig rc = run_config_from_config(config, problem);
    GaussianPolicy policy0 = policy0_from_config(config, problem.dim);

    RunHooks hooks;
    hooks.checkpoint_path = config.get_string("run", "checkpoint");
    hooks.checkpoint_every = config.get_int("run", "checkpoint_every");
    hooks.resume_path = config.get_string("run", "resume");
    if (verbosity >= 2) {
      hooks.on_step = [](const ThetaSnapshot& s) {
        std::cout << "round " << s.round << " step " << s.inner_step << " U~"
                  << format_double(s.batch_mean_L) << " cost "
                  << format_double(s.cum_hf_cost) << '\n';
      };
    }

    RunResult result = run(problem, policy0, rc, hooks);

    {
      std::ofstream trace_out(dir / "trace.csv", std::ios::binary | std::ios::trunc);
      result.trace.write_csv(trace_out);
    }
    write_file(dir / "history.csv", history_csv(result));
    if (problem.true_eval && problem.known_optimum) {
      auto curve = error_curve(result, problem);
      std::ostringstream ccsv;
      ccsv << "cum_hf_cost,abs_error\n";
      svg::Series series{"optimize", {}};
      for (auto [cost, err] : curve) {
        double abs_err = std::max(std::abs(err), 1e-12);
        ccsv << format_double(cost) << ',' << format_double(abs_err) << '\n';
        if (cost > 0) series.points.emplace_back(cost, abs_err);
      }
      write_file(dir / "error_curve.csv", ccsv.str());
      svg::PlotOptions opts;
      opts.title = "|f(mu) - f*| vs HF-equivalent evaluations";
      opts.x_label = "HF-equivalent evaluations";
      opts.y_label = "|f(mu) - f*|";
      opts.log_y = true;
      write_file(dir / "error_curve.svg", svg::line_plot({series}, opts));
    }

    std::cout << "estimator: " << estimator_name(rc.estimator) << '\n';
    std::cout << "converged: " << (result.converged ? "true" : "false") << " ("
              << stop_reason_name(result.reason) << ")\n";
    std::cout << "rounds: " << result.rounds_completed << ", steps: "
              << result.theta_history.size() << '\n';
    std::cout << "final mu: " << vec_to_string(result.final_mu) << '\n';
    std::cout << "final sigma: " << vec_to_string(result.final_sigma) << '\n';
    if (problem.true_eval) {
      EvalResult at_mu = problem.true_eval(result.final_mu);
      std::cout << "f(mu): " << format_double(at_mu.f);
      if (problem.known_optimum) {
        std::cout << "  (f* = " << format_double(*problem.known_optimum)
                  << ", error " << format_double(at_mu.f - *problem.known_optimum) << ")";
      }
      std::cout << '\n';
      if (!at_mu.c.empty()) {
        double worst = *std::max_element(at_mu.c.begin(), at_mu.c.end());
        std::cout << "constraints at mu: " << vec_to_string(at_mu.c)
                  << "  max: " << format_double(worst)
                  << (worst <= kFeasibilityTol ? " (feasible)" : " (violated)") << '\n';
      }
    }
    std::cout << "evaluations by level:";
    for (size_t l = 0; l < result.evals_by_level.size(); ++l) {
      std::cout << " L" << l + 1 << "=" << result.evals_by_level[l];
    }
    std::cout << "  hf-equivalent cost: " << format_double(result.hf_cost) << '\n';
    std::cout << "outputs: " << dir.string() << '\n';
    return kExitOk;
  } catch (...) {
    return map_exception_to_exit("optimize");
  }
}

int cmd_bench(const Config& config, const std::string& out_dir, int verbosity) {
  try {
    fs::path dir = prepare_out_dir(config, out_dir);

    SuiteConfig suite;
    suite.dims = config.get_ints("bench", "dims");
    suite.cases.clear();
    for (int c : config.get_ints("bench", "cases")) {
      if (c != 1 && c != 2) throw ConfigError("bench.cases entries must be 1 or 2");
      suite.cases.push_back(c == 1 ? SphereConstraint::kBoundary
                                   : SphereConstraint::kInterior);
    }
    suite.seeds = config.get_int("bench", "seeds");
    suite.seed0 = config.get_u64("bench", "seed0");
    suite.eps_f = config.get_double("bench", "eps_f");
    suite.noise_std = config.get_double("problem", "noise_std");
    suite.lf_cost_weight = config.get_double("problem", "lf_cost_weight");
    Vec mu0 = config.get_doubles("init", "mu0");
    suite.mu0_value = mu0[0];
    suite.sigma0 = config.get_double("init", "sigma0");
    suite.out_dir = (dir / "traces").string();

    double budget = config.get_double("bench", "budget_hf_cost");
    ProblemSpec proto = problem_from_config(config);
    RunConfig base = run_config_from_config(config, proto);
    base.max_hf_cost = budget;
    for (const std::string& name : config.get_strings("bench", "methods")) {
      SuiteMethod method;
      method.name = name;
      method.config = base;
      method.config.estimator = estimator_from_config_name(name);
      if (method.config.estimator == Estimator::kMultifidelity) {
        method.config.samples_per_level = config.get_ints("bench", "mf_samples");
      } else {
        method.config.samples_per_level = {base.samples_per_level.back()};
      }
      suite.methods.push_back(std::move(method));
    }

    SuiteResult result = benchmark_suite(suite);

    std::ostringstream manifest;
    manifest << "solver,problem_id,dim,f_star,eps_f,trace_path\n";
    std::ostringstream summary;
    summary << "method,problem_id,dim,case,seed,converged,reason,final_f,"
               "max_constraint,t_evals,t_hf_cost,hf_cost,failed\n";
    bool any_failed = false;
    for (const SuiteRun& run_rec : result.runs) {
      any_failed = any_failed || run_rec.failed;
      int case_index = run_rec.constraint == SphereConstraint::kBoundary ? 1 : 2;
      double f_star = case_index == 1 ? 0.5 : 0.0;
      if (!run_rec.failed) {
        manifest << run_rec.method << ',' << run_rec.problem_id << ',' << run_rec.dim
                 << ',' << format_double(f_star) << ',' << format_double(suite.eps_f)
                 << ',' << fs::path(run_rec.trace_file).filename().string() << '\n';
      }
      summary << run_rec.method << ',' << run_rec.problem_id << ',' << run_rec.dim
              << ',' << case_index << ',' << run_rec.seed << ','
              << (run_rec.result.converged ? "true" : "false") << ','
              << stop_reason_name(run_rec.result.reason) << ','
              << format_double(run_rec.final_f) << ','
              << format_double(run_rec.max_constraint) << ','
              << format_double(run_rec.t_evals) << ','
              << format_double(run_rec.t_hf_cost) << ','
              << format_double(run_rec.hf_cost) << ','
              << (run_rec.failed ? "true" : "false") << '\n';
      if (run_rec.failed && verbosity >= 1) {
        std::cout << "run failed: " << run_rec.problem_id << " [" << run_rec.method
                  << "]: " << run_rec.error << '\n';
      }
    }
    write_file(dir / "traces" / "bench_manifest.csv", manifest.str());
    write_file(dir / "bench_summary.csv", summary.str());

    // Error-vs-evaluations figures, one per (case, dim), all methods and seeds.
    for (int dim : suite.dims) {
      for (SphereConstraint which : suite.cases) {
        int case_index = which == SphereConstraint::kBoundary ? 1 : 2;
        std::vector<svg::Series> series;
        SphereCase sphere;
        sphere.dim = dim;
        sphere.constraint = which;
        sphere.noise_std = suite.noise_std;
        sphere.lf_cost_weight = suite.lf_cost_weight;
        ProblemSpec problem;
        try {
          problem = make_sphere(sphere);
        } catch (const Error&) {
          continue;  // combination already recorded as failed runs
        }
        for (const SuiteRun& run_rec : result.runs) {
          if (run_rec.failed || run_rec.dim != dim || run_rec.constraint != which) continue;
          svg::Series s;
          s.label = run_rec.method + "/" + run_rec.problem_id.substr(
                                               run_rec.problem_id.rfind("seed"));
          for (auto [cost, err] : error_curve(run_rec.result, problem)) {
            if (cost > 0) s.points.emplace_back(cost, std::max(std::abs(err), 1e-12));
          }
          series.push_back(std::move(s));
        }
        if (series.empty()) continue;
        svg::PlotOptions opts;
        opts.title = "sphere case " + std::to_string(case_index) + ", d=" +
                     std::to_string(dim);
        opts.x_label = "HF-equivalent evaluations";
        opts.y_label = "|f(mu) - f*|";
        opts.log_y = true;
        write_file(dir / ("error_case" + std::to_string(case_index) + "_d" +
                          std::to_string(dim) + ".svg"),
                   svg::line_plot(series, opts));
      }
    }

    std::cout << "bench: " << result.runs.size() << " runs, traces in "
              << suite.out_dir << '\n';
    return any_failed ? kExitRun : kExitOk;
  } catch (...) {
    return map_exception_to_exit("bench");
  }
}

int cmd_profile(const Config& config, const std::string& out_dir, int verbosity) {
  try {
    fs::path dir = prepare_out_dir(config, out_dir);
    std::string manifest_path = config.get_string("profile", "manifest");
    if (manifest_path.empty()) {
      throw ConfigError("missing required key 'profile.manifest'");
    }
    auto rows = read_manifest(manifest_path);
    fs::path manifest_dir = fs::path(manifest_path).parent_path();

    std::vector<std::string> solvers;
    std::vector<ProfileProblem> problems;
    std::map<std::string, size_t> solver_index, problem_index;
    for (const ManifestRow& row : rows) {
      if (!solver_index.count(row.solver)) {
        solver_index[row.solver] = solvers.size();
        solvers.push_back(row.solver);
      }
      if (!problem_index.count(row.problem_id)) {
        problem_index[row.problem_id] = problems.size();
        problems.push_back({row.problem_id, row.dim, row.f_star, row.eps_f});
      }
    }

    const double inf = std::numeric_limits<double>::infinity();
    ProfileInput by_evals{problems, solvers,
                          std::vector<std::vector<double>>(
                              problems.size(), std::vector<double>(solvers.size(), inf))};
    ProfileInput by_cost = by_evals;
    for (const ManifestRow& row : rows) {
      fs::path trace_path(row.trace_path);
      if (trace_path.is_relative()) trace_path = manifest_dir / trace_path;
      EvalTrace trace = ingest_external_trace_file(trace_path.string());
      size_t p = problem_index[row.problem_id];
      size_t s = solver_index[row.solver];
      by_evals.t[p][s] =
          evals_to_accuracy(trace, row.f_star, row.eps_f, CostMetric::kEvalIndex);
      by_cost.t[p][s] =
          evals_to_accuracy(trace, row.f_star, row.eps_f, CostMetric::kHfCost);
    }

    std::string metric = config.get_string("profile", "metric");
    const ProfileInput* chosen = nullptr;
    if (metric == "evals") {
      chosen = &by_evals;
    } else if (metric == "hf_cost") {
      chosen = &by_cost;
    } else {
      throw ConfigError("profile.metric must be 'evals' or 'hf_cost'");
    }

    double alpha_max = config.get_double("profile", "alpha_max");
    if (alpha_max <= 0) {
      double worst = 0;
      for (size_t p = 0; p < chosen->problems.size(); ++p) {
        for (double t : chosen->t[p]) {
          if (std::isfinite(t)) {
            worst = std::max(worst, t / (chosen->problems[p].dim + 1.0));
          }
        }
      }
      alpha_max = worst > 0 ? worst * 1.05 : 1.0;
    }
    int points = config.get_int("profile", "alpha_points");
    if (points < 2) throw ConfigError("profile.alpha_points must be >= 2");
    Vec alphas(points);
    for (int i = 0; i < points; ++i) {
      alphas[i] = alpha_max * static_cast<double>(i + 1) / points;
    }

    auto emit = [&](const ProfileInput& input, const std::string& stem) {
      auto profile = data_profile(input, alphas);
      write_file(dir / (stem + ".csv"), profile_to_csv(input, alphas, profile));
      return profile;
    };
    auto profile_evals = emit(by_evals, "profile_by_evals");
    auto profile_cost = emit(by_cost, "profile_by_hf_cost");
    const auto& chosen_profile = metric == "evals" ? profile_evals : profile_cost;

    std::vector<svg::Series> series;
    for (size_t s = 0; s < solvers.size(); ++s) {
      svg::Series ser;
      ser.label = solvers[s];
      for (size_t a = 0; a < alphas.size(); ++a) {
        ser.points.emplace_back(alphas[a], chosen_profile[s][a]);
      }
      series.push_back(std::move(ser));
    }
    svg::PlotOptions opts;
    opts.title = "data profiles (" + std::to_string(problems.size()) + " problems)";
    opts.x_label = "alpha (budget / (d+1), metric: " + metric + ")";
    opts.y_label = "fraction of problems solved";
    opts.step = true;
    write_file(dir / "data_profile.svg", svg::line_plot(series, opts));

    if (verbosity >= 1) {
      std::cout << "profile: " << problems.size() << " problems x " << solvers.size()
                << " solvers\n";
    }
    std::cout << "outputs: " << dir.string() << '\n';
    return kExitOk;
  } catch (...) {
    return map_exception_to_exit("profile");
  }
}

int cmd_variance(const Config& config, const std::string& out_dir, int verbosity) {
  try {
    fs::path dir = prepare_out_dir(config, out_dir);
    std::vector<int> dims = config.get_ints("variance", "dims");
    int repetitions = config.get_int("variance", "repetitions");
    int samples = config.get_int("variance", "samples");
    std::uint64_t seed = config.get_u64("variance", "seed");
    if (repetitions < 2) throw ConfigError("variance.repetitions must be >= 2");

    struct MethodSpec {
      const char* name;
      Estimator estimator;
      SampleScheme scheme;
    };
    const MethodSpec methods[] = {
        {"plain_pseudo", Estimator::kPlain, SampleScheme::kPseudo},
        {"baseline_qmc", Estimator::kBaseline, SampleScheme::kQmc},
    };

    std::ostringstream summary;
    summary << "d,plain_pseudo_var_max,baseline_qmc_var_max,ratio\n";
    std::vector<std::vector<svg::BoxStats>> boxes;
    std::vector<std::string> group_labels;

    for (int d : dims) {
      SphereCase sphere;
      sphere.dim = d;
      sphere.constraint = SphereConstraint::kInterior;
      sphere.noise_std = config.get_double("problem", "noise_std");
      ProblemSpec problem = make_sphere(sphere);
      GaussianPolicy theta{Vec(d, 1.0), Vec(d, 1.0)};  // mu = 1, sigma = e
      const Vec lambda(problem.constraint_count, 0.0);

      std::ostringstream runs_csv;
      runs_csv << "method,rep";
      for (int j = 1; j <= d; ++j) runs_csv << ",g_mu" << j;
      for (int j = 1; j <= d; ++j) runs_csv << ",g_logsigma" << j;
      runs_csv << '\n';

      std::vector<svg::BoxStats> group;
      Vec var_max(2, 0.0);
      for (int m = 0; m < 2; ++m) {
        const MethodSpec& method = methods[m];
        std::vector<GradEstimate> estimates;
        for (int rep = 0; rep < repetitions; ++rep) {
          SampleBatch batch = make_batch(method.scheme, samples, d, problem.noise_dim,
                                         derive_seed(seed, d, m, rep));
          GradEstimate est =
              method.estimator == Estimator::kPlain
                  ? sf_plain(theta, problem, problem.num_levels(), lambda, batch)
                  : sf_baseline(theta, problem, problem.num_levels(), lambda, batch);
          runs_csv << method.name << ',' << rep;
          for (double g : est.grad.d_mu) runs_csv << ',' << format_double(g);
          for (double g : est.grad.d_log_sigma) runs_csv << ',' << format_double(g);
          runs_csv << '\n';
          estimates.push_back(std::move(est));
        }
        VarianceReport report = variance_report(estimates);
        var_max[m] = report.max_component;

        Vec sorted = report.per_component;
        std::sort(sorted.begin(), sorted.end());
        auto quantile = [&](double q) {
          double idx = q * (sorted.size() - 1);
          size_t lo = static_cast<size_t>(idx);
          size_t hi = std::min(lo + 1, sorted.size() - 1);
          return sorted[lo] + (idx - lo) * (sorted[hi] - sorted[lo]);
        };
        svg::BoxStats box;
        box.label = method.name;
        box.min = sorted.front();
        box.q1 = quantile(0.25);
        box.median = quantile(0.5);
        box.q3 = quantile(0.75);
        box.max = sorted.back();
        group.push_back(box);
      }
      boxes.push_back(std::move(group));
      group_labels.push_back("d=" + std::to_string(d));
      summary << d << ',' << format_double(var_max[0]) << ',' << format_double(var_max[1])
              << ',' << format_double(var_max[0] / var_max[1]) << '\n';
      write_file(dir / ("variance_d" + std::to_string(d) + ".csv"), runs_csv.str());
      if (verbosity >= 1) {
        std::cout << "d=" << d << " variance ratio " << var_max[0] / var_max[1] << '\n';
      }
    }
    write_file(dir / "variance_summary.csv", summary.str());

    svg::PlotOptions opts;
    opts.title = "gradient estimator variance, " + std::to_string(repetitions) +
                 " repetitions";
    opts.x_label = "dimension";
    opts.y_label = "per-component variance";
    opts.log_y = true;
    write_file(dir / "variance_box.svg",
               svg::box_plot(group_labels, {"plain_pseudo", "baseline_qmc"}, boxes, opts));
    std::cout << "outputs: " << dir.string() << '\n';
    return kExitOk;
  } catch (...) {
    return map_exception_to_exit("variance");
  }
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Scout-Nd: constrained stochastic optimization of black-box simulators"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  bool seed_given = false;
  int workers = 0;
  bool workers_given = false;
  int verbosity = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "configuration file");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "seed override")->each([&](const std::string&) {
      seed_given = true;
    });
    sub->add_option("--workers", workers, "evaluation worker count")
        ->each([&](const std::string&) { workers_given = true; });
    sub->add_flag_function("-v", [&](std::int64_t n) { verbosity = static_cast<int>(n); },
                           "verbosity (-v, -vv)");
  };
  CLI::App* optimize = app.add_subcommand("optimize", "run the optimizer on one problem");
  CLI::App* bench = app.add_subcommand("bench", "run the benchmark suite");
  CLI::App* profile = app.add_subcommand("profile", "compute data profiles from traces");
  CLI::App* variance = app.add_subcommand("variance", "gradient-variance study");
  for (CLI::App* sub : {optimize, bench, profile, variance}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  Config config;
  try {
    config = config_path.empty() ? Config::defaults() : Config::parse_file(config_path);
    config.apply_env();
    if (seed_given) {
      std::string s = std::to_string(seed);
      config.set("run", "seed", s);
      config.set("bench", "seed0", s);
      config.set("variance", "seed", s);
    }
    if (workers_given) config.set("run", "workers", std::to_string(workers));
  } catch (...) {
    return map_exception_to_exit("config");
  }

  if (optimize->parsed()) return cmd_optimize(config, out_dir, verbosity);
  if (bench->parsed()) return cmd_bench(config, out_dir, verbosity);
  if (profile->parsed()) return cmd_profile(config, out_dir, verbosity);
  if (variance->parsed()) return cmd_variance(config, out_dir, verbosity);
  return kExitConfig;
}

}  // namespace scoutnd::cli
