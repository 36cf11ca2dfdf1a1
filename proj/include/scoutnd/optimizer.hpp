#pragma once

#include <functional>
#include <string>

#include "scoutnd/gradest.hpp"
#include "scoutnd/objective.hpp"
#include "scoutnd/policy.hpp"
#include "scoutnd/trace.hpp"

namespace scoutnd {

struct AdamConfig {
  double lr_mu = 0.005;
  double lr_log_sigma = 0.02;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  AdamConfig cfg;
  Vec m_mu, v_mu, m_log_sigma, v_log_sigma;
  long step_count = 0;

  explicit AdamState(const AdamConfig& c = {}, int dim = 0)
      : cfg(c), m_mu(dim, 0.0), v_mu(dim, 0.0), m_log_sigma(dim, 0.0),
        v_log_sigma(dim, 0.0) {}
};

// One bias-corrected ADAM descent step on theta = (mu, log sigma), with
// separate learning rates for the two blocks.
void adam_step(AdamState& state, GaussianPolicy& theta, const ThetaGrad& grad);

enum class Estimator { kPlain, kBaseline, kBaselineQmc, kMultifidelity };

std::string estimator_name(Estimator e);
Estimator estimator_from_name(const std::string& name);

struct RunConfig {
  Estimator estimator = Estimator::kBaselineQmc;
  // Per-level sample counts for the multi-fidelity estimator (lowest fidelity
  // first); single-level estimators read the last entry and evaluate the
  // highest-fidelity level.
  std::vector<int> samples_per_level = {50};
  PenaltySchedule schedule;  // empty = run unpenalized (lambda = 0)
  AdamConfig adam;
  double eps_theta = 1e-4;      // inner stagnation, measured on (mu, sigma)
  double eps_sigma = -1.0;      // <= 0 resolves to 0.02 * sqrt(d)
  int max_inner_steps = 500;
  int max_outer_rounds = 8;     // rounds past the schedule clamp at lambda_K
  std::uint64_t max_total_evals = 0;  // raw simulator calls; 0 = unlimited
  double max_hf_cost = 0.0;           // HF-equivalent budget; 0 = unlimited
  std::uint64_t seed = 0;
  int workers = 1;

  double resolved_eps_sigma(int dim) const;
  void validate() const;
};

struct ThetaSnapshot {
  int round = 0;       // SUMT round k, 0-based
  int inner_step = 0;  // inner iteration n within the round, 1-based
  Vec mu;
  Vec sigma;
  double batch_mean_L = 0.0;  // U(theta) estimate from this step's batch
  double cum_hf_cost = 0.0;
  std::uint64_t cum_evals = 0;
};

enum class StopReason { kSigmaCollapse, kBudget, kMaxRounds };

std::string stop_reason_name(StopReason r);

struct RunResult {
  Vec final_mu;
  Vec final_sigma;
  EvalTrace trace;
  std::vector<ThetaSnapshot> theta_history;
  bool converged = false;
  StopReason reason = StopReason::kMaxRounds;
  std::vector<std::uint64_t> evals_by_level;
  double hf_cost = 0.0;
  int rounds_completed = 0;
};

struct RunHooks {
  std::string checkpoint_path;  // empty = checkpointing disabled
  int checkpoint_every = 0;     // write every N inner steps (0 = never)
  std::string resume_path;      // empty = fresh start
  std::function<void(const ThetaSnapshot&)> on_step;
};

// Algorithm: nested loops of gradient estimation and ADAM updates. The inner
// loop exits on theta stagnation or the step cap; the outer loop advances the
// penalty schedule (warm-starting theta) until the search distribution's
// scale collapses below eps_sigma or a budget is hit.
RunResult run(const ProblemSpec& problem, const GaussianPolicy& policy0,
              const RunConfig& config, const RunHooks& hooks = {});

}  // namespace scoutnd
