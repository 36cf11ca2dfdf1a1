#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "scoutnd/cli.hpp"
#include "scoutnd/config.hpp"
#include "scoutnd/harness.hpp"
#include "scoutnd/svg.hpp"

using namespace scoutnd;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

fs::path fresh_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("minimal config materializes every default in the resolved dump") {
  Config config = Config::parse_string("[problem]\ndim = 4\n", "inline");
  std::string dump = config.resolved_dump();
  CHECK(dump.find("dim = 4") != std::string::npos);
  CHECK(dump.find("lr_mu = 0.005") != std::string::npos);
  CHECK(dump.find("estimator = baseline_qmc") != std::string::npos);
  CHECK(dump.find("noise_std = 0.31622776601683794") != std::string::npos);
  CHECK(dump.find("lambda0 = 1") != std::string::npos);
  CHECK(dump.find("mf_samples = 50,10") != std::string::npos);
  // default noise_std literal parses back to sqrt(0.1) exactly
  CHECK(config.get_double("problem", "noise_std") == std::sqrt(0.1));
}

TEST_CASE("unknown keys are rejected by name") {
  try {
    Config::parse_string("[adam]\nlerning_rate = 0.1\n", "inline");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("lerning_rate") != std::string::npos);
  }
  CHECK_THROWS_AS(Config::parse_string("[nosuch]\nkey = 1\n", "inline"), ConfigError);
  CHECK_THROWS_AS(Config::parse_string("key = 1\n", "inline"), ConfigError);
  CHECK_THROWS_AS(Config::parse_string("[run]\nseed 12\n", "inline"), ConfigError);
  CHECK_THROWS_AS(Config::parse_string("[run]\nseed = abc\n", "inline"), ConfigError);
  CHECK_THROWS_AS(Config::parse_string("[run\nseed = 1\n", "inline"), ConfigError);
}

TEST_CASE("config errors carry file origin and line number") {
  try {
    Config::parse_string("[run]\n\nworkrs = 2\n", "myfile.cfg");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    std::string msg = e.what();
    CHECK(msg.find("myfile.cfg:3") != std::string::npos);
    CHECK(msg.find("workrs") != std::string::npos);
  }
}

TEST_CASE("resolved dump round-trips to an identical configuration") {
  Config config = Config::parse_string(
      "[problem]\ndim = 8\ncase = 2\n[run]\nseed = 99\nsamples_per_level = 32\n"
      "[adam]\nlr_mu = 0.25\n",
      "inline");
  std::string dump = config.resolved_dump();
  Config back = Config::parse_string(dump, "dump");
  CHECK(back == config);
  CHECK(back.resolved_dump() == dump);
}

TEST_CASE("environment overrides use SCOUTND_<SECTION>_<KEY>") {
  setenv("SCOUTND_RUN_SEED", "4242", 1);
  setenv("SCOUTND_ADAM_BETA1", "0.5", 1);
  Config config = Config::defaults();
  config.apply_env();
  CHECK(config.get_u64("run", "seed") == 4242);
  CHECK(config.get_double("adam", "beta1") == 0.5);
  unsetenv("SCOUTND_RUN_SEED");
  unsetenv("SCOUTND_ADAM_BETA1");
}

TEST_CASE("list values parse with broadcast semantics downstream") {
  Config config = Config::parse_string(
      "[bench]\ndims = 2, 4,8\n[init]\nmu0 = 0.5,0.25\n", "inline");
  CHECK(config.get_ints("bench", "dims") == std::vector<int>{2, 4, 8});
  CHECK(config.get_doubles("init", "mu0") == std::vector<double>{0.5, 0.25});
  CHECK_THROWS_AS(Config::parse_string("[bench]\ndims = 2,,8\n", "inline"),
                  ConfigError);
}

TEST_CASE("cmd_variance: row counts, determinism, ratio column") {
  Config config = Config::parse_string(
      "[variance]\ndims = 2\nrepetitions = 10\nsamples = 64\nseed = 5\n", "inline");
  fs::path out1 = fresh_dir("scoutnd_var1");
  fs::path out2 = fresh_dir("scoutnd_var2");
  CHECK(cli::cmd_variance(config, out1.string()) == cli::kExitOk);
  CHECK(cli::cmd_variance(config, out2.string()) == cli::kExitOk);

  std::string runs = slurp(out1 / "variance_d2.csv");
  // header + 2 methods x 10 repetitions
  CHECK(std::count(runs.begin(), runs.end(), '\n') == 21);
  CHECK(runs.find("plain_pseudo") != std::string::npos);
  CHECK(runs.find("baseline_qmc") != std::string::npos);

  // fixed seed -> byte-identical outputs
  CHECK(slurp(out2 / "variance_d2.csv") == runs);
  CHECK(slurp(out2 / "variance_summary.csv") == slurp(out1 / "variance_summary.csv"));
  CHECK(slurp(out1 / "variance_summary.csv").find("ratio") != std::string::npos);
  CHECK(fs::exists(out1 / "variance_box.svg"));
  CHECK(fs::exists(out1 / "resolved.cfg"));
  fs::remove_all(out1);
  fs::remove_all(out2);
}

TEST_CASE("cmd_variance at the full-paper dimensions: d=32 ratio >= 5") {
  Config config = Config::parse_string(
      "[variance]\ndims = 2,8,32\nrepetitions = 10\nsamples = 128\nseed = 12\n",
      "inline");
  fs::path out = fresh_dir("scoutnd_var_paper");
  REQUIRE(cli::cmd_variance(config, out.string()) == cli::kExitOk);
  std::istringstream summary(slurp(out / "variance_summary.csv"));
  std::string line;
  std::getline(summary, line);  // header
  double ratio_d32 = 0.0;
  while (std::getline(summary, line)) {
    auto first_comma = line.find(',');
    if (line.substr(0, first_comma) == "32") {
      ratio_d32 = std::stod(line.substr(line.rfind(',') + 1));
    }
  }
  CHECK(ratio_d32 >= 5.0);
  fs::remove_all(out);
}

TEST_CASE("cmd_bench twice with one config is byte-identical; profile matches harness") {
  std::string cfg_text =
      "[bench]\n"
      "dims = 2\n"
      "cases = 1\n"
      "seeds = 2\n"
      "seed0 = 7\n"
      "budget_hf_cost = 1500\n"
      "[run]\n"
      "samples_per_level = 25\n";
  Config config = Config::parse_string(cfg_text, "inline");
  fs::path out1 = fresh_dir("scoutnd_bench1");
  fs::path out2 = fresh_dir("scoutnd_bench2");
  REQUIRE(cli::cmd_bench(config, out1.string()) == cli::kExitOk);
  REQUIRE(cli::cmd_bench(config, out2.string()) == cli::kExitOk);

  int traces_compared = 0;
  for (const auto& entry : fs::directory_iterator(out1 / "traces")) {
    fs::path twin = out2 / "traces" / entry.path().filename();
    REQUIRE(fs::exists(twin));
    CHECK(slurp(entry.path()) == slurp(twin));
    ++traces_compared;
  }
  CHECK(traces_compared == 5);  // 2 methods x 2 seeds + manifest
  CHECK(slurp(out1 / "bench_summary.csv") == slurp(out2 / "bench_summary.csv"));

  // profile over the bench traces reproduces the harness numbers bit-for-bit
  Config pconfig = Config::parse_string(
      "[profile]\nmanifest = " + (out1 / "traces" / "bench_manifest.csv").string() +
          "\nalpha_points = 64\nalpha_max = 400\n",
      "inline");
  fs::path pout = fresh_dir("scoutnd_profile1");
  REQUIRE(cli::cmd_profile(pconfig, pout.string()) == cli::kExitOk);

  // independent recomputation through the harness API
  ProfileInput input;
  input.solvers = {"scout-nd", "mf-scout-nd"};
  for (int seed = 0; seed < 2; ++seed) {
    std::string id = "sphere_case1_d2_seed" + std::to_string(seed);
    input.problems.push_back({id, 2, 0.5, 0.1});
    std::vector<double> row;
    for (const std::string& solver : input.solvers) {
      EvalTrace trace = ingest_external_trace_file(
          (out1 / "traces" / ("trace_" + solver + "_" + id + ".csv")).string());
      row.push_back(evals_to_accuracy(trace, 0.5, 0.1, CostMetric::kHfCost));
    }
    input.t.push_back(row);
  }
  Vec alphas(64);
  for (int i = 0; i < 64; ++i) alphas[i] = 400.0 * (i + 1) / 64.0;
  auto profile = data_profile(input, alphas);
  CHECK(slurp(pout / "profile_by_hf_cost.csv") ==
        profile_to_csv(input, alphas, profile));

  // SVG structural check: plotted step points match the profile values
  auto series = svg::parse_data_polylines(slurp(pout / "data_profile.svg"));
  REQUIRE(series.size() == 2);
  CHECK(series[0].label == "scout-nd");
  // step plot inserts a corner point between every pair
  CHECK(series[0].points.size() == 2 * alphas.size() - 1);

  fs::remove_all(out1);
  fs::remove_all(out2);
  fs::remove_all(pout);
}

TEST_CASE("cmd_optimize end to end: resolved dump re-runs identically") {
  std::string cfg_text =
      "[problem]\ndim = 2\ncase = 2\n"
      "[run]\nseed = 3\nmax_hf_cost = 1500\nsamples_per_level = 25\n";
  Config config = Config::parse_string(cfg_text, "inline");
  fs::path out1 = fresh_dir("scoutnd_opt1");
  REQUIRE(cli::cmd_optimize(config, out1.string()) == cli::kExitOk);
  CHECK(fs::exists(out1 / "trace.csv"));
  CHECK(fs::exists(out1 / "history.csv"));
  CHECK(fs::exists(out1 / "error_curve.csv"));
  CHECK(fs::exists(out1 / "error_curve.svg"));

  Config from_dump = Config::parse_file((out1 / "resolved.cfg").string());
  fs::path out2 = fresh_dir("scoutnd_opt2");
  REQUIRE(cli::cmd_optimize(from_dump, out2.string()) == cli::kExitOk);
  CHECK(slurp(out1 / "trace.csv") == slurp(out2 / "trace.csv"));
  CHECK(slurp(out1 / "history.csv") == slurp(out2 / "history.csv"));
  fs::remove_all(out1);
  fs::remove_all(out2);
}

TEST_CASE("cmd_profile without a manifest is a config error") {
  Config config = Config::defaults();
  fs::path out = fresh_dir("scoutnd_profile_err");
  CHECK(cli::cmd_profile(config, out.string()) == cli::kExitConfig);
  fs::remove_all(out);
}

TEST_CASE("run_cli parses subcommands and maps bad flags to config exits") {
  const char* bad[] = {"scoutnd", "frobnicate"};
  CHECK(cli::run_cli(2, bad) == cli::kExitConfig);
  const char* missing[] = {"scoutnd", "profile", "--config", "/nonexistent.cfg"};
  CHECK(cli::run_cli(4, missing) == cli::kExitIo);
}

TEST_CASE("problem_from_config rejects bad kinds and cases") {
  Config config = Config::parse_string("[problem]\ncase = 3\n", "inline");
  CHECK_THROWS_AS(cli::problem_from_config(config), ConfigError);
  Config ext = Config::parse_string("[problem]\nkind = external\n", "inline");
  CHECK_THROWS_AS(cli::problem_from_config(ext), ConfigError);  // no command1
}
