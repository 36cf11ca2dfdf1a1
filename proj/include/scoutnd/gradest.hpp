#pragma once

#include <cstdint>

#include "scoutnd/objective.hpp"
#include "scoutnd/policy.hpp"
#include "scoutnd/sampling.hpp"
#include "scoutnd/trace.hpp"

namespace scoutnd {

// Estimated gradient of the smoothed upper bound U(theta), with variance
// and evaluation-cost accounting.
struct GradEstimate {
  ThetaGrad grad;
  // Estimated variance of the estimate itself, per theta component
  // (mu block first, then log-sigma block): sum over levels of
  // samplevar(per-sample terms) / S_level.
  Vec per_component_variance;
  std::vector<std::uint64_t> evals_by_level;  // actual simulator calls
  double charged_hf_cost = 0.0;               // sum_l S_l * cost_l / cost_L
  double batch_mean_L = 0.0;                  // MC estimate of U(theta)
};

// Shared context for one estimate: worker parallelism and optional trace
// recording. Trace records are committed in ascending sample order after the
// batch completes, so results do not depend on scheduling.
struct EvalContext {
  int workers = 1;
  EvalTrace* trace = nullptr;
};

// Plain score-function estimator:
// grad = (1/S) sum_i L(x_i, b_i, lambda) * score(policy, x_i).
GradEstimate sf_plain(const GaussianPolicy& policy, const ProblemSpec& problem,
                      int level, const Vec& lambda, const SampleBatch& batch,
                      const EvalContext& ctx = {});

// Leave-one-out baseline: each sample is weighted by
// L_i - mean of the other S-1 values. Unbiased, same evaluation cost.
GradEstimate sf_baseline(const GaussianPolicy& policy, const ProblemSpec& problem,
                         int level, const Vec& lambda, const SampleBatch& batch,
                         const EvalContext& ctx = {});

// Multi-fidelity telescope over the problem's level ladder with the
// leave-one-out baseline applied within each level term. Level difference
// terms couple the same (x_i, b_i) at levels l and l-1; batches must be
// independent across levels, one per level, lowest fidelity first.
GradEstimate sf_multifidelity(const GaussianPolicy& policy,
                              const ProblemSpec& problem, const Vec& lambda,
                              const std::vector<SampleBatch>& batches,
                              const EvalContext& ctx = {});

struct VarianceReport {
  Vec per_component;      // sample variance across repetitions
  double max_component = 0.0;
  double mean_component = 0.0;
  double trace_total = 0.0;  // sum over components
};

// Componentwise empirical variance across repeated estimates.
VarianceReport variance_report(const std::vector<GradEstimate>& repetitions);

}  // namespace scoutnd
