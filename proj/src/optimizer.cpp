#include "scoutnd/optimizer.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

namespace scoutnd {

namespace {

using nlohmann::json;

double l2_norm(const Vec& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double theta_step_norm(const GaussianPolicy& before, const GaussianPolicy& after) {
  double s = 0.0;
  for (int j = 0; j < before.dim(); ++j) {
    double dmu = after.mu[j] - before.mu[j];
    double dsig = std::exp(after.log_sigma[j]) - std::exp(before.log_sigma[j]);
    s += dmu * dmu + dsig * dsig;
  }
  return std::sqrt(s);
}

struct LoopState {
  GaussianPolicy theta;
  AdamState adam;
  int round = 0;
  int inner_step = 0;  // next inner step index within the round, 1-based
  std::uint64_t cum_evals = 0;
  double cum_hf_cost = 0.0;
  std::vector<ThetaSnapshot> history;
  EvalTrace trace;
};

constexpr int kCheckpointVersion = 1;

json vec_to_json(const Vec& v) { return json(v); }

Vec vec_from_json(const json& j) { return j.get<Vec>(); }

json checkpoint_to_json(const LoopState& st, const RunConfig& config, int dim) {
  json j;
  j["format"] = "scoutnd-checkpoint";
  j["version"] = kCheckpointVersion;
  j["dim"] = dim;
  j["seed"] = config.seed;
  j["round"] = st.round;
  j["inner_step"] = st.inner_step;
  j["mu"] = vec_to_json(st.theta.mu);
  j["log_sigma"] = vec_to_json(st.theta.log_sigma);
  j["adam"] = {{"m_mu", st.adam.m_mu},
               {"v_mu", st.adam.v_mu},
               {"m_log_sigma", st.adam.m_log_sigma},
               {"v_log_sigma", st.adam.v_log_sigma},
               {"step_count", st.adam.step_count}};
  j["cum_evals"] = st.cum_evals;
  j["cum_hf_cost"] = st.cum_hf_cost;
  json hist = json::array();
  for (const ThetaSnapshot& s : st.history) {
    hist.push_back({{"round", s.round},
                    {"inner_step", s.inner_step},
                    {"mu", s.mu},
                    {"sigma", s.sigma},
                    {"batch_mean_L", s.batch_mean_L},
                    {"cum_hf_cost", s.cum_hf_cost},
                    {"cum_evals", s.cum_evals}});
  }
  j["history"] = std::move(hist);
  json trace = json::array();
  for (const TraceRecord& r : st.trace.records()) {
    trace.push_back({{"level", r.level},
                     {"hf_cost", r.hf_cost},
                     {"f", r.f},
                     {"c", r.c}});
  }
  j["trace"] = std::move(trace);
  return j;
}

LoopState checkpoint_from_json(const json& j, const RunConfig& config, int dim) {
  if (!j.is_object() || j.value("format", "") != "scoutnd-checkpoint") {
    throw IoError("checkpoint: not a scoutnd checkpoint file");
  }
  if (j.value("version", -1) != kCheckpointVersion) {
    throw IoError("checkpoint: version mismatch (have " +
                  std::to_string(j.value("version", -1)) + ", expected " +
                  std::to_string(kCheckpointVersion) + ")");
  }
  if (j.value("dim", -1) != dim) {
    throw IoError("checkpoint: dimension mismatch");
  }
  if (j.value("seed", std::uint64_t{0}) != config.seed) {
    throw IoError("checkpoint: seed differs from run configuration");
  }
  LoopState st;
  st.theta.mu = vec_from_json(j.at("mu"));
  st.theta.log_sigma = vec_from_json(j.at("log_sigma"));
  st.theta.validate();
  const json& a = j.at("adam");
  st.adam = AdamState(config.adam, dim);
  st.adam.m_mu = vec_from_json(a.at("m_mu"));
  st.adam.v_mu = vec_from_json(a.at("v_mu"));
  st.adam.m_log_sigma = vec_from_json(a.at("m_log_sigma"));
  st.adam.v_log_sigma = vec_from_json(a.at("v_log_sigma"));
  st.adam.step_count = a.at("step_count").get<long>();
  st.round = j.at("round").get<int>();
  st.inner_step = j.at("inner_step").get<int>();
  st.cum_evals = j.at("cum_evals").get<std::uint64_t>();
  st.cum_hf_cost = j.at("cum_hf_cost").get<double>();
  for (const json& s : j.at("history")) {
    ThetaSnapshot snap;
    snap.round = s.at("round").get<int>();
    snap.inner_step = s.at("inner_step").get<int>();
    snap.mu = vec_from_json(s.at("mu"));
    snap.sigma = vec_from_json(s.at("sigma"));
    snap.batch_mean_L = s.at("batch_mean_L").get<double>();
    snap.cum_hf_cost = s.at("cum_hf_cost").get<double>();
    snap.cum_evals = s.at("cum_evals").get<std::uint64_t>();
    st.history.push_back(std::move(snap));
  }
  double prev_cost = 0.0;
  for (const json& r : j.at("trace")) {
    double cost = r.at("hf_cost").get<double>();
    st.trace.append(r.at("level").get<int>(), cost - prev_cost,
                    r.at("f").get<double>(), vec_from_json(r.at("c")));
    prev_cost = cost;
  }
  return st;
}

void write_checkpoint(const LoopState& st, const RunConfig& config, int dim,
                      const std::string& path) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("checkpoint: cannot write " + tmp);
    out << checkpoint_to_json(st, config, dim);
    if (!out.good()) throw IoError("checkpoint: write failed for " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw IoError("checkpoint: cannot move " + tmp + " into place");
  }
}

LoopState read_checkpoint(const std::string& path, const RunConfig& config, int dim) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("checkpoint: cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw IoError(std::string("checkpoint: parse error: ") + e.what());
  }
  return checkpoint_from_json(j, config, dim);
}

}  // namespace

void adam_step(AdamState& state, GaussianPolicy& theta, const ThetaGrad& grad) {
  const int d = theta.dim();
  if (grad.dim() != d || static_cast<int>(state.m_mu.size()) != d) {
    throw DimensionError("adam_step: shape mismatch");
  }
  const AdamConfig& c = state.cfg;
  state.step_count += 1;
  const double bc1 = 1.0 - std::pow(c.beta1, state.step_count);
  const double bc2 = 1.0 - std::pow(c.beta2, state.step_count);
  for (int j = 0; j < d; ++j) {
    double g = grad.d_mu[j];
    state.m_mu[j] = c.beta1 * state.m_mu[j] + (1.0 - c.beta1) * g;
    state.v_mu[j] = c.beta2 * state.v_mu[j] + (1.0 - c.beta2) * g * g;
    theta.mu[j] -= c.lr_mu * (state.m_mu[j] / bc1) /
                   (std::sqrt(state.v_mu[j] / bc2) + c.eps);

    g = grad.d_log_sigma[j];
    state.m_log_sigma[j] = c.beta1 * state.m_log_sigma[j] + (1.0 - c.beta1) * g;
    state.v_log_sigma[j] = c.beta2 * state.v_log_sigma[j] + (1.0 - c.beta2) * g * g;
    theta.log_sigma[j] -= c.lr_log_sigma * (state.m_log_sigma[j] / bc1) /
                          (std::sqrt(state.v_log_sigma[j] / bc2) + c.eps);
  }
}

std::string estimator_name(Estimator e) {
  switch (e) {
    case Estimator::kPlain: return "plain";
    case Estimator::kBaseline: return "baseline";
    case Estimator::kBaselineQmc: return "baseline_qmc";
    case Estimator::kMultifidelity: return "multifidelity";
  }
  return "unknown";
}

Estimator estimator_from_name(const std::string& name) {
  if (name == "plain") return Estimator::kPlain;
  if (name == "baseline") return Estimator::kBaseline;
  if (name == "baseline_qmc") return Estimator::kBaselineQmc;
  if (name == "multifidelity") return Estimator::kMultifidelity;
  throw ConfigError("unknown estimator '" + name +
                    "' (expected plain|baseline|baseline_qmc|multifidelity)");
}

std::string stop_reason_name(StopReason r) {
  switch (r) {
    case StopReason::kSigmaCollapse: return "sigma_collapse";
    case StopReason::kBudget: return "budget";
    case StopReason::kMaxRounds: return "max_rounds";
  }
  return "unknown";
}

double RunConfig::resolved_eps_sigma(int dim) const {
  return eps_sigma > 0.0 ? eps_sigma : 0.02 * std::sqrt(static_cast<double>(dim));
}

void RunConfig::validate() const {
  if (samples_per_level.empty()) throw ValueError("run config: samples_per_level empty");
  for (int s : samples_per_level) {
    if (s < 2) throw ValueError("run config: per-level sample counts must be >= 2");
  }
  if (!(eps_theta > 0.0)) throw ValueError("run config: eps_theta must be positive");
  if (max_inner_steps < 1 || max_outer_rounds < 1) {
    throw ValueError("run config: step and round caps must be >= 1");
  }
  if (workers < 1) throw ValueError("run config: workers must be >= 1");
  schedule.validate();
}

RunResult run(const ProblemSpec& problem, const GaussianPolicy& policy0,
              const RunConfig& config, const RunHooks& hooks) {
  problem.validate();
  policy0.validate();
  config.validate();
  if (policy0.dim() != problem.dim) {
    throw DimensionError("run: policy dimension does not match problem");
  }
  const int dim = problem.dim;
  const int n_levels = problem.num_levels();
  const bool multifidelity = config.estimator == Estimator::kMultifidelity;
  if (multifidelity && static_cast<int>(config.samples_per_level.size()) != n_levels) {
    throw ValueError("run: multifidelity needs one sample count per level");
  }
  const double eps_sigma = config.resolved_eps_sigma(dim);
  const Vec zero_lambda(problem.constraint_count, 0.0);

  LoopState st;
  if (!hooks.resume_path.empty()) {
    st = read_checkpoint(hooks.resume_path, config, dim);
  } else {
    st.theta = policy0;
    st.adam = AdamState(config.adam, dim);
    st.inner_step = 1;
  }

  EvalContext ctx{config.workers, &st.trace};
  const SampleScheme scheme =
      (config.estimator == Estimator::kPlain || config.estimator == Estimator::kBaseline)
          ? SampleScheme::kPseudo
          : SampleScheme::kQmc;

  auto budget_exhausted = [&] {
    if (config.max_total_evals > 0 && st.cum_evals >= config.max_total_evals) return true;
    if (config.max_hf_cost > 0.0 && st.cum_hf_cost >= config.max_hf_cost) return true;
    return false;
  };

  // Flat state machine over (round, inner_step) so that a checkpoint taken
  // between any two steps resumes to the identical trajectory: the round
  // transition happens atomically with the step that triggered it, and the
  // outer stop conditions are recomputable from the stored state alone.
  RunResult result;
  std::uint64_t steps_taken = 0;
  if (!hooks.checkpoint_path.empty() && hooks.checkpoint_every > 0) {
    write_checkpoint(st, config, dim, hooks.checkpoint_path);
  }
  for (;;) {
    if (st.round > 0 && st.inner_step == 1) {
      // Outer loop boundary: the penalty round just ended.
      if (l2_norm(st.theta.sigma()) <= eps_sigma) {
        result.converged = true;
        result.reason = StopReason::kSigmaCollapse;
        break;
      }
      if (budget_exhausted()) {
        result.converged = false;
        result.reason = StopReason::kBudget;
        break;
      }
      if (st.round >= config.max_outer_rounds) {
        result.converged = false;
        result.reason = StopReason::kMaxRounds;
        break;
      }
    }
    const Vec& lambda = config.schedule.empty()
                            ? zero_lambda
                            : config.schedule.lambdas[std::min(
                                  st.round, config.schedule.rounds() - 1)];
    if (st.inner_step == 1) st.adam = AdamState(config.adam, dim);

    GaussianPolicy before = st.theta;
    GradEstimate est;
    if (multifidelity) {
      std::vector<SampleBatch> batches;
      batches.reserve(n_levels);
      for (int level = 1; level <= n_levels; ++level) {
        batches.push_back(make_batch(
            scheme, config.samples_per_level[level - 1], dim, problem.noise_dim,
            derive_seed(config.seed, st.round, st.inner_step, level)));
      }
      est = sf_multifidelity(st.theta, problem, lambda, batches, ctx);
    } else {
      SampleBatch batch = make_batch(
          scheme, config.samples_per_level.back(), dim, problem.noise_dim,
          derive_seed(config.seed, st.round, st.inner_step, n_levels));
      switch (config.estimator) {
        case Estimator::kPlain:
          est = sf_plain(st.theta, problem, n_levels, lambda, batch, ctx);
          break;
        default:
          est = sf_baseline(st.theta, problem, n_levels, lambda, batch, ctx);
          break;
      }
    }
    adam_step(st.adam, st.theta, est.grad);

    for (std::uint64_t e : est.evals_by_level) st.cum_evals += e;
    st.cum_hf_cost += est.charged_hf_cost;
    ++steps_taken;

    ThetaSnapshot snap;
    snap.round = st.round;
    snap.inner_step = st.inner_step;
    snap.mu = st.theta.mu;
    snap.sigma = st.theta.sigma();
    snap.batch_mean_L = est.batch_mean_L;
    snap.cum_hf_cost = st.cum_hf_cost;
    snap.cum_evals = st.cum_evals;
    st.history.push_back(snap);
    if (hooks.on_step) hooks.on_step(snap);

    bool stagnated = theta_step_norm(before, st.theta) <= config.eps_theta;
    if (stagnated || st.inner_step >= config.max_inner_steps || budget_exhausted()) {
      st.round += 1;
      st.inner_step = 1;
    } else {
      st.inner_step += 1;
    }
    if (!hooks.checkpoint_path.empty() && hooks.checkpoint_every > 0 &&
        steps_taken % hooks.checkpoint_every == 0) {
      write_checkpoint(st, config, dim, hooks.checkpoint_path);
    }
  }

  if (!hooks.checkpoint_path.empty()) {
    write_checkpoint(st, config, dim, hooks.checkpoint_path);
  }

  result.rounds_completed = st.round;
  result.final_mu = st.theta.mu;
  result.final_sigma = st.theta.sigma();
  result.trace = std::move(st.trace);
  result.theta_history = std::move(st.history);
  result.hf_cost = st.cum_hf_cost;
  result.evals_by_level.assign(n_levels, 0);
  for (const TraceRecord& r : result.trace.records()) {
    result.evals_by_level[r.level - 1] += 1;
  }
  return result;
}

}  // namespace scoutnd
